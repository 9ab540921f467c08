#include "prefcheck/evalmetrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prefcheck/digest.hpp"
#include "prefcheck/errors.hpp"
#include "prefcheck/rng.hpp"

namespace prefcheck {

using nlohmann::ordered_json;

double diff_accuracy(const std::vector<EvalItem>& items,
                     bool drop_prediction_ties) {
  double credit = 0.0;
  std::size_t n = 0;
  for (const EvalItem& item : items) {
    if (item.label == Label::Tie) continue;
    const double gap = item.reward_a - item.reward_b;
    if (gap == 0.0) {
      if (drop_prediction_ties) continue;
      credit += 0.5;
    } else {
      const bool predicted_a = gap > 0.0;
      if (predicted_a == (item.label == Label::A)) credit += 1.0;
    }
    ++n;
  }
  if (n == 0) {
    throw NoScorableItems("every item was tie-labeled or dropped");
  }
  return credit / double(n);
}

double tau_with_ties(const std::vector<EvalItem>& items, double tie_threshold) {
  if (items.empty()) throw NoScorableItems("no items to correlate");
  if (tie_threshold < 0.0) {
    throw OutOfRangeValue("tie threshold must be >= 0");
  }
  long long concordant = 0;
  long long discordant = 0;
  for (const EvalItem& item : items) {
    const double gap = item.reward_a - item.reward_b;
    Label predicted;
    if (std::fabs(gap) <= tie_threshold) predicted = Label::Tie;
    else predicted = gap > 0.0 ? Label::A : Label::B;

    if (predicted == item.label) {
      ++concordant;
    } else if ((predicted == Label::A && item.label == Label::B) ||
               (predicted == Label::B && item.label == Label::A)) {
      ++discordant;
    }
    // A tie on exactly one side is neither agreement nor reversal.
  }
  return double(concordant - discordant) / double(items.size());
}

double calibrate_tie_threshold(const std::vector<EvalItem>& dev_items) {
  if (dev_items.empty()) {
    throw EmptyDataset("threshold calibration needs a nonempty dev set");
  }
  std::vector<double> gaps;
  gaps.reserve(dev_items.size());
  for (const EvalItem& item : dev_items) {
    gaps.push_back(std::fabs(item.reward_a - item.reward_b));
  }
  std::sort(gaps.begin(), gaps.end());

  // 99th percentile with linear interpolation between order statistics.
  double p99;
  if (gaps.size() == 1) {
    p99 = gaps[0];
  } else {
    const double pos = 0.99 * double(gaps.size() - 1);
    const std::size_t lo = std::size_t(pos);
    const std::size_t hi = std::min(lo + 1, gaps.size() - 1);
    const double frac = pos - double(lo);
    p99 = gaps[lo] + frac * (gaps[hi] - gaps[lo]);
  }
  if (p99 <= 0.0) return 0.0;

  double best_threshold = 0.0;
  double best_tau = -2.0;
  for (int k = 0; k < 200; ++k) {
    const double t = double(k) * p99 / 199.0;
    const double tau = tau_with_ties(dev_items, t);
    // Strict improvement keeps the smallest maximizing threshold.
    if (tau > best_tau) {
      best_tau = tau;
      best_threshold = t;
    }
  }
  return best_threshold;
}

MetricsReport evaluate(const std::vector<EvalItem>& items,
                       const std::vector<EvalItem>& dev_items,
                       bool drop_prediction_ties) {
  MetricsReport report;
  report.n_total = items.size();
  report.drop_prediction_ties = drop_prediction_ties;
  report.tie_threshold = calibrate_tie_threshold(dev_items);
  report.tau = tau_with_ties(items, report.tie_threshold);
  report.diff_accuracy = diff_accuracy(items, drop_prediction_ties);

  for (const EvalItem& item : items) {
    if (item.label == Label::Tie) continue;
    if (drop_prediction_ties && item.reward_a == item.reward_b) continue;
    ++report.n_scored;
  }
  return report;
}

std::string serialize_metrics(const MetricsReport& report) {
  ordered_json doc;
  doc["n_total"] = report.n_total;
  doc["n_scored"] = report.n_scored;
  doc["diff_accuracy"] = report.diff_accuracy;
  doc["tau"] = report.tau;
  doc["tie_threshold"] = report.tie_threshold;
  doc["drop_prediction_ties"] = report.drop_prediction_ties;
  return doc.dump(2) + "\n";
}

std::vector<SizeAccuracy> accuracy_vs_question_count(
    const std::vector<AnswerSet>& corpus,
    const std::vector<PreferenceRecord>& records, const WeightVector& weights,
    const ChecklistSchema& schema, const std::vector<std::size_t>& sizes,
    std::uint64_t seed) {
  const std::size_t n = schema.size();
  for (std::size_t s : sizes) {
    if (s > n) {
      throw SizeTooLarge("requested size " + std::to_string(s) + " exceeds " +
                         std::to_string(n) + " questions");
    }
  }
  if (weights.weights.size() != n) {
    throw DimensionMismatch("weights do not match the schema");
  }

  // Magnitude order; a seeded shuffle breaks exact ties so equal-weight
  // questions do not silently favor schema order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "size-order"));
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return std::fabs(weights.weights[a]) >
                            std::fabs(weights.weights[b]);
                   });

  const std::vector<FeatureVector> features = extract_all(corpus, schema);

  std::vector<SizeAccuracy> out;
  for (std::size_t s : sizes) {
    WeightVector restricted = weights;
    for (std::size_t k = s; k < n; ++k) restricted.weights[order[k]] = 0.0;

    std::map<std::string, double> totals;
    for (const FeatureVector& fv : features) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!fv.masked[i]) total += restricted.weights[i] * fv.values[i];
      }
      totals[fv.sample_id] = total;
    }

    std::vector<EvalItem> items;
    for (const PreferenceRecord& rec : records) {
      auto a = totals.find(rec.sample_a);
      auto b = totals.find(rec.sample_b);
      if (a == totals.end() || b == totals.end()) {
        throw ValidationError("pair '" + rec.pair_id +
                              "' references a sample outside the corpus");
      }
      items.push_back({rec.pair_id, derive_label(rec), a->second, b->second});
    }
    out.push_back({s, diff_accuracy(items)});
  }
  return out;
}

std::vector<EvalItem> build_eval_items(const std::vector<PreferenceRecord>& records,
                                       const std::vector<RewardReport>& reports) {
  std::map<std::string, double> totals;
  for (const RewardReport& r : reports) totals[r.sample_id] = r.total;

  std::vector<EvalItem> items;
  items.reserve(records.size());
  for (const PreferenceRecord& rec : records) {
    auto a = totals.find(rec.sample_a);
    auto b = totals.find(rec.sample_b);
    if (a == totals.end() || b == totals.end()) {
      throw ValidationError("pair '" + rec.pair_id + "': sample '" +
                            (a == totals.end() ? rec.sample_a : rec.sample_b) +
                            "' has no reward report");
    }
    items.push_back({rec.pair_id, derive_label(rec), a->second, b->second});
  }
  return items;
}

}  // namespace prefcheck
