#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

#include <prefcheck/errors.hpp>
#include <prefcheck/evalmetrics.hpp>
#include <prefcheck/rng.hpp>
#include <prefcheck/synthlab.hpp>

#include "test_support.hpp"

using namespace prefcheck;

namespace {

EvalItem item(Label label, double a, double b, std::string id = "p") {
  return {std::move(id), label, a, b};
}

}  // namespace

TEST_CASE("diff accuracy credits wins fully and exact ties by half") {
  const std::vector<EvalItem> items = {
      item(Label::A, 0.9, 0.1), item(Label::B, 0.2, 0.7),
      item(Label::A, 0.5, 0.5), item(Label::B, 0.3, 0.3),
      item(Label::Tie, 0.8, 0.1)};

  // Two hits and two half-credit zero gaps over four scorable items.
  CHECK(diff_accuracy(items) == 0.75);

  SUBCASE("dropping prediction ties rescales the denominator") {
    CHECK(diff_accuracy(items, true) == 1.0);
  }

  SUBCASE("a reversal earns nothing") {
    std::vector<EvalItem> wrong = items;
    wrong.push_back(item(Label::B, 0.9, 0.2));
    CHECK(diff_accuracy(wrong) == 0.6);
  }

  SUBCASE("tie-labeled items never enter the denominator") {
    const std::vector<EvalItem> only = {item(Label::A, 1.0, 0.0),
                                        item(Label::Tie, 1.0, 0.0),
                                        item(Label::Tie, 0.0, 0.0)};
    CHECK(diff_accuracy(only) == 1.0);
  }

  SUBCASE("nothing scorable is an error") {
    CHECK_THROWS_AS(diff_accuracy({}), NoScorableItems);
    CHECK_THROWS_AS(diff_accuracy({item(Label::Tie, 1.0, 0.0)}), NoScorableItems);
    CHECK_THROWS_AS(diff_accuracy({item(Label::A, 0.5, 0.5)}, true),
                    NoScorableItems);
  }
}

TEST_CASE("tau with ties scores three-way agreement") {
  const std::vector<EvalItem> items = {
      item(Label::A, 0.9, 0.1), item(Label::B, 0.2, 0.7),
      item(Label::A, 0.5, 0.5), item(Label::B, 0.3, 0.3),
      item(Label::Tie, 0.8, 0.8)};

  // At threshold 0: two hits, two one-sided ties, one exact tie match.
  CHECK(tau_with_ties(items, 0.0) == 0.6);

  SUBCASE("perfect and reversed predictions hit the extremes") {
    const std::vector<EvalItem> perfect = {item(Label::A, 1.0, 0.0),
                                           item(Label::B, 0.0, 1.0),
                                           item(Label::Tie, 0.5, 0.5)};
    CHECK(tau_with_ties(perfect, 0.0) == 1.0);

    const std::vector<EvalItem> reversed = {item(Label::B, 1.0, 0.0),
                                            item(Label::A, 0.0, 1.0)};
    CHECK(tau_with_ties(reversed, 0.0) == -1.0);
  }

  SUBCASE("a one-sided tie contributes zero") {
    CHECK(tau_with_ties({item(Label::Tie, 1.0, 0.0)}, 0.0) == 0.0);
    CHECK(tau_with_ties({item(Label::A, 0.5, 0.5)}, 0.0) == 0.0);
  }

  SUBCASE("the threshold widens the predicted-tie band") {
    // gap 0.2: below the 0.25 threshold the prediction becomes Tie.
    const std::vector<EvalItem> narrow = {item(Label::Tie, 0.6, 0.4)};
    CHECK(tau_with_ties(narrow, 0.0) == 0.0);
    CHECK(tau_with_ties(narrow, 0.25) == 1.0);
  }

  SUBCASE("tau equals 2 * accuracy - 1 without any ties") {
    Rng rng(7);
    std::vector<EvalItem> clean;
    for (int i = 0; i < 100; ++i) {
      const double a = rng.real(0.0, 1.0);
      double b = rng.real(0.0, 1.0);
      if (a == b) b += 0.25;
      clean.push_back(item(rng.chance(0.5) ? Label::A : Label::B, a, b));
    }
    const double acc = diff_accuracy(clean);
    CHECK(tau_with_ties(clean, 0.0) ==
          doctest::Approx(2.0 * acc - 1.0).epsilon(1e-12));
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(tau_with_ties({}, 0.0), NoScorableItems);
    CHECK_THROWS_AS(tau_with_ties(items, -0.1), OutOfRangeValue);
  }
}

TEST_CASE("threshold calibration picks the smallest maximizer") {
  SUBCASE("separable items without tie labels calibrate to zero") {
    const std::vector<EvalItem> dev = {item(Label::A, 1.0, 0.0),
                                       item(Label::B, 0.2, 0.9),
                                       item(Label::A, 0.8, 0.3)};
    CHECK(calibrate_tie_threshold(dev) == 0.0);
  }

  SUBCASE("a tie-labeled gap pulls the threshold just past it") {
    const std::vector<EvalItem> dev = {item(Label::Tie, 0.5, 0.2),
                                       item(Label::A, 1.0, 0.0),
                                       item(Label::A, 2.0, 0.0)};
    const double t = calibrate_tie_threshold(dev);
    // Covering the 0.3 tie gap without swallowing the 1.0 win gap makes
    // every item agree; the grid lands just above 0.3.
    CHECK(t >= 0.3);
    CHECK(t < 0.4);
    CHECK(tau_with_ties(dev, t) == 1.0);
  }

  SUBCASE("all-zero gaps calibrate to zero") {
    const std::vector<EvalItem> dev = {item(Label::Tie, 0.5, 0.5),
                                       item(Label::Tie, 0.2, 0.2)};
    CHECK(calibrate_tie_threshold(dev) == 0.0);
  }

  SUBCASE("an empty dev set is an error") {
    CHECK_THROWS_AS(calibrate_tie_threshold({}), EmptyDataset);
  }
}

TEST_CASE("evaluate composes calibration, tau, and accuracy") {
  const std::vector<EvalItem> dev = {item(Label::A, 1.0, 0.0),
                                     item(Label::B, 0.0, 1.0)};
  const std::vector<EvalItem> items = {
      item(Label::A, 0.9, 0.1), item(Label::B, 0.2, 0.7),
      item(Label::A, 0.5, 0.5), item(Label::Tie, 0.4, 0.4)};

  const MetricsReport report = evaluate(items, dev);
  CHECK(report.n_total == 4);
  CHECK(report.n_scored == 3);
  CHECK(report.tie_threshold == 0.0);
  CHECK(report.diff_accuracy == doctest::Approx(2.5 / 3.0).epsilon(1e-15));
  CHECK(report.tau == 0.75);  // +1 +1 0 +1 over 4
  CHECK(!report.drop_prediction_ties);

  SUBCASE("dropping prediction ties shrinks n_scored") {
    const MetricsReport dropped = evaluate(items, dev, true);
    CHECK(dropped.n_total == 4);
    CHECK(dropped.n_scored == 2);
    CHECK(dropped.diff_accuracy == 1.0);
    CHECK(dropped.drop_prediction_ties);
  }

  SUBCASE("the report serializes faithfully") {
    const nlohmann::json doc = nlohmann::json::parse(serialize_metrics(report));
    CHECK(doc["n_total"] == 4);
    CHECK(doc["n_scored"] == 3);
    CHECK(doc["diff_accuracy"].get<double>() == report.diff_accuracy);
    CHECK(doc["tau"].get<double>() == report.tau);
    CHECK(doc["tie_threshold"].get<double>() == 0.0);
    CHECK(doc["drop_prediction_ties"] == false);
  }
}

TEST_CASE("metrics agree with independent recounts on random data") {
  Rng rng(808);
  std::vector<EvalItem> items;
  for (int i = 0; i < 200; ++i) {
    const int which = int(rng.below(3));
    const Label label = which == 0 ? Label::A : which == 1 ? Label::B : Label::Tie;
    // A coarse grid makes exact zero gaps common.
    const double a = double(rng.below(5)) * 0.25;
    const double b = double(rng.below(5)) * 0.25;
    items.push_back(item(label, a, b, "p" + std::to_string(i)));
  }

  SUBCASE("diff accuracy recount") {
    double credit = 0.0;
    std::size_t n = 0;
    for (const EvalItem& it : items) {
      if (it.label == Label::Tie) continue;
      ++n;
      if (it.reward_a == it.reward_b) credit += 0.5;
      else if ((it.reward_a > it.reward_b) == (it.label == Label::A)) credit += 1.0;
    }
    CHECK(diff_accuracy(items) == credit / double(n));
  }

  SUBCASE("tau recount at a positive threshold") {
    const double threshold = 0.25;
    long long score = 0;
    for (const EvalItem& it : items) {
      const double gap = it.reward_a - it.reward_b;
      Label predicted = std::fabs(gap) <= threshold
                            ? Label::Tie
                            : (gap > 0.0 ? Label::A : Label::B);
      if (predicted == it.label) ++score;
      else if (predicted != Label::Tie && it.label != Label::Tie) --score;
    }
    CHECK(tau_with_ties(items, threshold) ==
          double(score) / double(items.size()));
  }

  SUBCASE("swapping sides and labels changes nothing") {
    std::vector<EvalItem> swapped = items;
    for (EvalItem& it : swapped) {
      std::swap(it.reward_a, it.reward_b);
      if (it.label == Label::A) it.label = Label::B;
      else if (it.label == Label::B) it.label = Label::A;
    }
    CHECK(diff_accuracy(swapped) == diff_accuracy(items));
    CHECK(tau_with_ties(swapped, 0.25) == tau_with_ties(items, 0.25));
  }

  SUBCASE("a power-of-two reward scaling is invisible") {
    std::vector<EvalItem> scaled = items;
    for (EvalItem& it : scaled) {
      it.reward_a *= 4.0;
      it.reward_b *= 4.0;
    }
    CHECK(diff_accuracy(scaled) == diff_accuracy(items));
    CHECK(tau_with_ties(scaled, 1.0) == tau_with_ties(items, 0.25));
  }
}

TEST_CASE("build_eval_items joins records with report totals") {
  RewardReport ra;
  ra.sample_id = "sa";
  ra.total = 0.9;
  RewardReport rb;
  rb.sample_id = "sb";
  rb.total = 0.4;

  PreferenceRecord rec;
  rec.pair_id = "p1";
  rec.sample_a = "sa";
  rec.sample_b = "sb";
  rec.label = Label::A;
  PreferenceRecord scored;
  scored.pair_id = "p2";
  scored.sample_a = "sb";
  scored.sample_b = "sa";
  scored.annotator_scores = {2, 1, 2};  // mean below 3: sample_b preferred

  const std::vector<EvalItem> items = build_eval_items({rec, scored}, {ra, rb});
  REQUIRE(items.size() == 2);
  CHECK(items[0].pair_id == "p1");
  CHECK(items[0].label == Label::A);
  CHECK(items[0].reward_a == 0.9);
  CHECK(items[0].reward_b == 0.4);
  CHECK(items[1].label == Label::B);
  CHECK(items[1].reward_a == 0.4);
  CHECK(items[1].reward_b == 0.9);

  PreferenceRecord orphan = rec;
  orphan.sample_b = "missing";
  CHECK_THROWS_WITH_AS(build_eval_items({orphan}, {ra, rb}),
                       doctest::Contains("missing"), ValidationError);
}

TEST_CASE("accuracy as a function of checklist size") {
  const SyntheticWorld world = gen_world(2, 2, 3, 31);
  const std::vector<AnswerSet> samples = gen_samples(world, 60);
  const std::vector<PreferenceRecord> records =
      gen_preferences(world, samples, 300);
  const WeightVector weights = true_weight_vector(world);
  const std::size_t n = world.schema.size();

  const std::vector<SizeAccuracy> curve = accuracy_vs_question_count(
      samples, records, weights, world.schema, {0, 1, n / 2, n}, 5);
  REQUIRE(curve.size() == 4);
  CHECK(curve[0].size == 0);
  CHECK(curve[3].size == n);

  SUBCASE("size zero predicts nothing but half-credit ties") {
    CHECK(curve[0].accuracy == 0.5);
  }

  SUBCASE("the full size reproduces the plain accuracy") {
    const std::vector<FeatureVector> features = extract_all(samples, world.schema);
    std::vector<EvalItem> items;
    for (const PreferenceRecord& rec : records) {
      double ta = 0.0, tb = 0.0;
      for (const FeatureVector& fv : features) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (!fv.masked[i]) total += weights.weights[i] * fv.values[i];
        }
        if (fv.sample_id == rec.sample_a) ta = total;
        if (fv.sample_id == rec.sample_b) tb = total;
      }
      items.push_back({rec.pair_id, derive_label(rec), ta, tb});
    }
    CHECK(curve[3].accuracy == diff_accuracy(items));
  }

  SUBCASE("the sweep is deterministic per seed") {
    const std::vector<SizeAccuracy> again = accuracy_vs_question_count(
        samples, records, weights, world.schema, {0, 1, n / 2, n}, 5);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      CHECK(again[i].size == curve[i].size);
      CHECK(again[i].accuracy == curve[i].accuracy);
    }
  }

  SUBCASE("oversized requests are rejected") {
    CHECK_THROWS_AS(accuracy_vs_question_count(samples, records, weights,
                                               world.schema, {n + 1}, 5),
                    SizeTooLarge);
  }

  SUBCASE("foreign weights are rejected") {
    WeightVector bad = weights;
    bad.weights.pop_back();
    CHECK_THROWS_AS(accuracy_vs_question_count(samples, records, bad,
                                               world.schema, {1}, 5),
                    DimensionMismatch);
  }

  SUBCASE("records outside the corpus are rejected") {
    std::vector<PreferenceRecord> alien = records;
    alien[0].sample_a = "ghost";
    CHECK_THROWS_AS(accuracy_vs_question_count(samples, alien, weights,
                                               world.schema, {1}, 5),
                    ValidationError);
  }
}
