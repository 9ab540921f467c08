// Acceptance gate: every release-blocking behavior checked end to end
// against independent oracles, one pass/fail line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <prefcheck/checklist.hpp>
#include <prefcheck/digest.hpp>
#include <prefcheck/errors.hpp>
#include <prefcheck/evalmetrics.hpp>
#include <prefcheck/features.hpp>
#include <prefcheck/ingest.hpp>
#include <prefcheck/io.hpp>
#include <prefcheck/pipeline.hpp>
#include <prefcheck/rng.hpp>
#include <prefcheck/scoring.hpp>
#include <prefcheck/selection.hpp>
#include <prefcheck/synthlab.hpp>
#include <prefcheck/trainer.hpp>

using namespace prefcheck;

namespace {

struct Failure {
  std::string message;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw Failure{message};
}

std::string fmt(double v) { return io::format_double(v); }

int g_failures = 0;

void run_criterion(int number, const std::string& name,
                   const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string verdict = "PASS";
  std::string detail;
  try {
    body();
  } catch (const Failure& f) {
    verdict = "FAIL";
    detail = f.message;
    ++g_failures;
  } catch (const std::exception& e) {
    verdict = "FAIL";
    detail = std::string("unexpected exception: ") + e.what();
    ++g_failures;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", verdict.c_str(), number,
              name.c_str(), seconds, detail.empty() ? "" : " -- ",
              detail.c_str());
  std::fflush(stdout);
}

std::filesystem::path data_dir() {
  if (const char* dir = std::getenv("PREFCHECK_DATA_DIR")) {
    return std::filesystem::path(dir);
  }
  return std::filesystem::path(PREFCHECK_DATA_DIR);
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir =
      std::filesystem::temp_directory_path() / ("prefcheck_accept_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

// Pearson correlation of averaged ranks; the tie-robust monotonicity
// measure used for the question-count sweep.
std::vector<double> averaged_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = double(i + j) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::vector<double> rx = averaged_ranks(xs);
  const std::vector<double> ry = averaged_ranks(ys);
  const double n = double(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Dominance recomputed from scratch so the selection library is not the
// judge of its own output.
bool oracle_dominates(const RewardReport& a, const RewardReport& b) {
  for (const auto& [name, va] : a.by_dimension) {
    if (va < b.by_dimension.at(name)) return false;
  }
  return a.total > b.total;
}

double held_out_sign_agreement(const std::vector<TrainingPair>& held,
                               const WeightVector& w) {
  std::size_t hits = 0;
  for (const TrainingPair& p : held) {
    double margin = 0.0;
    for (std::size_t i = 0; i < w.weights.size(); ++i) {
      margin += w.weights[i] * p.diff.values[i];
    }
    if (margin != 0.0 && (margin > 0.0) == (p.y == 1)) ++hits;
  }
  return double(hits) / double(held.size());
}

void criterion_nonnegativity() {
  Rng meta(1001);
  int trained = 0;
  for (int run = 0; trained < 100 && run < 150; ++run) {
    WorldConfig wc;
    wc.dims = 1 + std::size_t(meta.below(3));
    wc.subdims_per_dim = 1 + std::size_t(meta.below(3));
    wc.questions_per_subdim = 2 + std::size_t(meta.below(3));
    wc.gate_fraction = meta.real(0.0, 0.8);
    wc.weight_sparsity = meta.real(0.0, 0.8);
    wc.seed = std::uint64_t(run);
    const SyntheticWorld world = gen_world(wc);
    const std::vector<AnswerSet> samples = gen_samples(world, 30);
    const std::vector<PreferenceRecord> prefs =
        gen_preferences(world, samples, 120, meta.real(0.0, 0.2));
    const PairBuildResult built = make_training_pairs(
        prefs, extract_all(samples, world.schema), world.schema);
    if (built.pairs.empty()) continue;

    TrainingConfig tc;
    tc.learning_rate = run % 3 == 0 ? 0.5 : run % 3 == 1 ? 0.1 : 0.05;
    tc.convergence_epsilon = 1e-4;
    tc.max_outer_iterations = 60;
    tc.seed = std::uint64_t(run) + 7;
    if (run % 2 == 0) {
      tc.init = TrainingConfig::Init::uniform;
      tc.init_low = -0.5;
      tc.init_high = 0.5;
    }
    tc.batch = run % 5 == 0 ? TrainingConfig::Batch::full
                            : TrainingConfig::Batch::per_pair;

    const WeightVector w = train_weights(built.pairs, world.schema, tc);
    ++trained;
    for (std::size_t i = 0; i < w.weights.size(); ++i) {
      require(std::isfinite(w.weights[i]),
              "run " + std::to_string(run) + ": weight " + std::to_string(i) +
                  " is not finite");
      require(w.weights[i] >= 0.0,
              "run " + std::to_string(run) + ": weight " + std::to_string(i) +
                  " = " + fmt(w.weights[i]) + " < 0");
      if (world.schema.questions()[i].is_gate()) {
        require(w.weights[i] == 0.0,
                "run " + std::to_string(run) + ": gate weight " +
                    std::to_string(i) + " = " + fmt(w.weights[i]) + " != 0");
      }
    }
  }
  require(trained == 100,
          "only " + std::to_string(trained) + " of 100 runs produced pairs");
}

void criterion_gradient() {
  Rng rng(2002);
  const double h = 1e-6;
  for (int point = 0; point < 100; ++point) {
    const std::size_t n = 20;
    std::vector<double> wv(n), dv(n);
    for (double& x : wv) x = rng.real(0.0, 2.0);
    for (double& x : dv) x = rng.real(-1.0, 1.0);
    const int y = rng.chance(0.5) ? 1 : 0;

    DiffVector diff;
    diff.schema_hash = "oracle";
    diff.values = dv;
    diff.masked.assign(n, 0);
    WeightVector w;
    w.schema_hash = "oracle";
    w.weights = wv;

    const std::vector<double> g = loss_gradient(diff, y, w);
    for (std::size_t i = 0; i < n; ++i) {
      WeightVector plus = w, minus = w;
      plus.weights[i] += h;
      minus.weights[i] -= h;
      const double numeric =
          (logistic_loss(diff, y, plus) - logistic_loss(diff, y, minus)) /
          (2.0 * h);
      const double err = std::abs(g[i] - numeric) / std::max(1.0, std::abs(g[i]));
      require(err <= 1e-4, "point " + std::to_string(point) + " coordinate " +
                               std::to_string(i) + ": relative error " +
                               fmt(err));
    }
  }
}

void criterion_weight_recovery() {
  WorldConfig wc;
  wc.dims = 2;
  wc.subdims_per_dim = 1;
  wc.questions_per_subdim = 5;  // 10 questions, all informative
  wc.gate_fraction = 0.0;
  wc.weight_sparsity = 0.0;
  wc.seed = 101;
  const SyntheticWorld world = gen_world(wc);
  require(world.schema.size() == 10, "expected a 10-question world");

  const std::vector<AnswerSet> samples = gen_samples(world, 200);
  const std::vector<PreferenceRecord> prefs =
      gen_preferences(world, samples, 6500);
  const PairBuildResult built = make_training_pairs(
      prefs, extract_all(samples, world.schema), world.schema);
  require(built.pairs.size() >= 6000,
          "only " + std::to_string(built.pairs.size()) + " non-tie pairs");

  const std::vector<TrainingPair> train(built.pairs.begin(),
                                        built.pairs.begin() + 5000);
  const std::vector<TrainingPair> held(built.pairs.begin() + 5000,
                                       built.pairs.begin() + 6000);

  TrainingConfig tc;
  tc.learning_rate = 0.1;
  tc.convergence_epsilon = 1e-6;
  tc.max_outer_iterations = 300;
  tc.seed = 7;

  const double clean =
      held_out_sign_agreement(held, train_weights(train, world.schema, tc));
  require(clean >= 0.99,
          "noise-free held-out agreement " + fmt(clean) + " < 0.99");

  // 10% label flips on the training pairs only; held-out stays clean.
  std::vector<TrainingPair> noisy = train;
  Rng flipper(derive_seed(9, "flip"));
  for (TrainingPair& p : noisy) {
    if (flipper.chance(0.1)) p.y = 1 - p.y;
  }
  const double robust =
      held_out_sign_agreement(held, train_weights(noisy, world.schema, tc));
  require(robust >= 0.90,
          "noisy held-out agreement " + fmt(robust) + " < 0.90");
}

void criterion_mpo_soundness() {
  WorldConfig wc;
  wc.dims = 2;
  wc.subdims_per_dim = 2;
  wc.questions_per_subdim = 3;
  wc.candidates_per_prompt = 4;
  wc.seed = 44;
  const SyntheticWorld world = gen_world(wc);
  const std::size_t n_prompts = 10000;
  const std::vector<AnswerSet> samples =
      gen_samples(world, n_prompts * wc.candidates_per_prompt);
  const std::vector<RewardReport> reports = score_batch(
      extract_all(samples, world.schema), true_weight_vector(world),
      world.schema);
  const std::vector<CandidateGroup> groups = group_by_prompt(reports);
  require(groups.size() == n_prompts,
          "expected 10000 groups, got " + std::to_string(groups.size()));

  std::map<std::string, std::map<std::string, const RewardReport*>> lookup;
  for (const CandidateGroup& g : groups) {
    for (const RewardReport& r : g.candidates) {
      lookup[g.prompt_id][r.sample_id] = &r;
    }
  }
  auto oracle_not_dominated = [&](const std::vector<SelectedPair>& pairs) {
    std::size_t count = 0;
    for (const SelectedPair& p : pairs) {
      const RewardReport* w = lookup.at(p.prompt_id).at(p.winner_id);
      const RewardReport* l = lookup.at(p.prompt_id).at(p.loser_id);
      if (!oracle_dominates(*w, *l)) ++count;
    }
    return count;
  };

  SelectionConfig mpo;
  mpo.mode = SelectionMode::mpo;
  const std::vector<SelectedPair> mpo_pairs = select_pairs(groups, mpo);
  require(!mpo_pairs.empty(), "mpo emitted no pairs at all");
  require(oracle_not_dominated(mpo_pairs) == 0,
          "mpo emitted pairs the oracle rejects");
  const SelectionStats mpo_stats = selection_stats(mpo_pairs, groups, mpo);
  require(mpo_stats.not_dominated_count == 0,
          "library audit disagrees: " +
              std::to_string(mpo_stats.not_dominated_count) + " not dominated");

  SelectionConfig dpo = mpo;
  dpo.mode = SelectionMode::dpo;
  std::vector<SelectedPair> dpo_pairs = select_pairs(groups, dpo);
  require(dpo_pairs.size() > mpo_pairs.size(),
          "dpo should emit strictly more pairs than mpo here");
  dpo_pairs.resize(mpo_pairs.size());  // matched pair count
  const std::size_t dpo_bad = oracle_not_dominated(dpo_pairs);
  require(dpo_bad > 0,
          "dpo at matched pair count produced no dominance violations");
}

void criterion_mpo_subset() {
  Rng rng(3003);
  for (int trial = 0; trial < 1000; ++trial) {
    CandidateGroup group;
    group.prompt_id = "p";
    const std::size_t k = 2 + std::size_t(rng.below(5));
    for (std::size_t c = 0; c < k; ++c) {
      RewardReport r;
      r.sample_id = "s" + std::to_string(c);
      r.schema_hash = "h";
      r.weights_fingerprint = "fp";
      r.by_dimension = {{"D1", double(rng.below(5)) * 0.25},
                        {"D2", double(rng.below(5)) * 0.25},
                        {"D3", double(rng.below(5)) * 0.25}};
      for (const auto& [name, v] : r.by_dimension) r.total += v;
      group.candidates.push_back(std::move(r));
    }
    SelectionConfig config;
    config.threshold = double(rng.below(4)) * 0.25;

    config.mode = SelectionMode::mpo;
    const std::vector<SelectedPair> mpo = select_pairs(group, config);
    config.mode = SelectionMode::dpo;
    const std::vector<SelectedPair> dpo = select_pairs(group, config);

    for (const SelectedPair& p : mpo) {
      const bool found = std::any_of(dpo.begin(), dpo.end(),
                                     [&](const SelectedPair& q) { return q == p; });
      require(found, "trial " + std::to_string(trial) + ": mpo pair " +
                         p.winner_id + ">" + p.loser_id + " missing from dpo");
    }
  }
}

void criterion_decomposition() {
  std::size_t scored = 0;
  for (std::uint64_t seed : {11u, 22u, 33u, 44u}) {
    WorldConfig wc;
    wc.dims = 3;
    wc.subdims_per_dim = 2;
    wc.questions_per_subdim = 3;
    wc.continuous_alignment = seed % 2 == 0;
    wc.seed = seed;
    const SyntheticWorld world = gen_world(wc);
    const std::vector<AnswerSet> samples = gen_samples(world, 2500);
    const std::vector<RewardReport> reports = score_batch(
        extract_all(samples, world.schema), true_weight_vector(world),
        world.schema);
    for (const RewardReport& r : reports) {
      double by_dim = 0.0, by_q = 0.0;
      for (const auto& [name, v] : r.by_dimension) by_dim += v;
      for (const auto& [name, v] : r.by_question) by_q += v;
      require(std::abs(r.total - by_dim) <= 1e-9,
              r.sample_id + ": dimension sum drifts by " +
                  fmt(std::abs(r.total - by_dim)));
      require(std::abs(r.total - by_q) <= 1e-9,
              r.sample_id + ": question sum drifts by " +
                  fmt(std::abs(r.total - by_q)));
      ++scored;
    }
  }
  require(scored == 10000, "expected 10000 scored samples");
}

void criterion_weight_replay() {
  const ChecklistSchema schema =
      ChecklistSchema::load_file(data_dir() / "image_schema.json");
  const WeightVector weights =
      load_weights(io::read_file(data_dir() / "image_weights.jsonl"), schema);

  AnswerSet set;
  set.sample_id = "replay";
  for (const Question& q : schema.questions()) {
    if (q.gate.has_value()) continue;  // behind a closed gate
    if (q.is_gate()) set.answers.emplace(q.id, false);
    else if (q.kind == QuestionKind::continuous) set.answers.emplace(q.id, 0.0);
    else {
      set.answers.emplace(q.id,
                          q.id == "symmetry.q1" || q.id == "richness.q0");
    }
  }

  const RewardReport report =
      score(extract_features(set, schema), weights, schema);
  // 0.069 + 0.583 evaluated in doubles is the closest representable value
  // to 0.652; the report must carry exactly that sum.
  require(report.total == 0.069 + 0.583,
          "total " + fmt(report.total) + " is not the exact sum of the two "
          "active weights");
  require(std::abs(report.total - 0.652) <= 1e-12,
          "total " + fmt(report.total) + " is not 0.652");
  require(report.by_dimension.at("Composition") == report.total,
          "the two active questions must both land in Composition");
  for (const std::string dim : {"Quality", "Fidelity", "Safety & Emotion",
                                "Alignment"}) {
    require(report.by_dimension.at(dim) == 0.0, dim + " must contribute 0");
  }
}

void criterion_question_count_scaling() {
  WorldConfig wc;
  wc.dims = 3;
  wc.subdims_per_dim = 2;
  wc.questions_per_subdim = 5;  // 30 questions, all informative
  wc.gate_fraction = 0.0;
  wc.weight_sparsity = 0.0;
  wc.seed = 88;
  const SyntheticWorld world = gen_world(wc);
  require(world.schema.size() == 30, "expected a 30-question world");

  const std::vector<AnswerSet> samples = gen_samples(world, 300);
  const std::vector<PreferenceRecord> train_prefs =
      gen_preferences(world, samples, 1500);
  const std::vector<PreferenceRecord> eval_prefs = [&] {
    std::vector<PreferenceRecord> all = gen_preferences(world, samples, 2500);
    return std::vector<PreferenceRecord>(all.begin() + 1500, all.end());
  }();

  const PairBuildResult built = make_training_pairs(
      train_prefs, extract_all(samples, world.schema), world.schema);
  TrainingConfig tc;
  tc.learning_rate = 0.1;
  tc.convergence_epsilon = 1e-5;
  tc.max_outer_iterations = 200;
  tc.seed = 12;
  const WeightVector trained = train_weights(built.pairs, world.schema, tc);

  const std::vector<std::size_t> sizes = {1, 2, 4, 8, 16, 30};
  const std::vector<SizeAccuracy> curve = accuracy_vs_question_count(
      samples, eval_prefs, trained, world.schema, sizes, 17);

  std::vector<double> xs, ys;
  std::string shape;
  for (const SizeAccuracy& point : curve) {
    xs.push_back(double(point.size));
    ys.push_back(point.accuracy);
    shape += " " + std::to_string(point.size) + ":" + fmt(point.accuracy);
  }
  const double rho = spearman(xs, ys);
  require(rho >= 0.8, "Spearman(size, accuracy) = " + fmt(rho) + " < 0.8 on" +
                          shape);
  require(ys.back() - ys.front() >= 0.05,
          "accuracy(30) - accuracy(1) = " + fmt(ys.back() - ys.front()) +
              " < 0.05 on" + shape);
}

void criterion_consistency_metric() {
  WorldConfig clean_config;
  clean_config.dims = 3;
  clean_config.subdims_per_dim = 2;
  clean_config.questions_per_subdim = 4;
  clean_config.seed = 55;
  const SyntheticWorld clean_world = gen_world(clean_config);
  const ConsistencyReport clean =
      consistency(gen_samples(clean_world, 1000), clean_world.schema);
  require(clean.overall.rate().has_value(), "no qualifying groups");
  require(*clean.overall.rate() == 1.0,
          "monotone corpus measured " + fmt(*clean.overall.rate()));

  WorldConfig planted_config = clean_config;
  planted_config.consistency_violation_rate = 0.05;
  planted_config.seed = 56;
  const SyntheticWorld planted_world = gen_world(planted_config);
  const ConsistencyReport planted =
      consistency(gen_samples(planted_world, 1000), planted_world.schema);
  require(planted.overall.rate().has_value(), "no qualifying groups");
  const double measured = 1.0 - *planted.overall.rate();
  require(std::abs(measured - 0.05) <= 0.001,
          "planted 5% violations, measured " + fmt(measured * 100.0) + "%");
}

void criterion_balanced_sampling() {
  const ChecklistSchema schema =
      ChecklistSchema::load_file(data_dir() / "image_schema.json");
  Rng rng(7007);

  std::vector<std::string> gradable;
  for (const std::string& sub : schema.sub_dimension_order()) {
    if (!schema.ladder(sub).empty()) gradable.push_back(sub);
  }

  std::vector<GradedAnnotation> annotations;
  for (int i = 0; i < 1000; ++i) {
    GradedAnnotation a;
    a.sample_id = "s" + std::to_string(i);
    a.sub_dimension = gradable[std::size_t(rng.below(gradable.size()))];
    const std::vector<std::size_t>& ladder = schema.ladder(a.sub_dimension);
    // A slice of gated sub-dimensions report the attribute as absent.
    bool gated = false;
    for (std::size_t idx : ladder) {
      if (schema.gate_of(idx)) gated = true;
    }
    if (gated && rng.chance(0.2)) {
      a.option_rank = std::nullopt;
    } else {
      a.option_rank = int(rng.between(-1, std::int64_t(ladder.size()) - 1));
    }
    annotations.push_back(std::move(a));
  }

  const auto [instances, summary] = balanced_sample(annotations, schema, 99);

  // Independent recount of available positives/negatives per question.
  std::map<std::string, std::pair<std::size_t, std::size_t>> available;
  for (const GradedAnnotation& a : annotations) {
    if (!a.option_rank) continue;
    for (std::size_t idx : schema.ladder(a.sub_dimension)) {
      const Question& q = schema.questions()[idx];
      if (q.kind != QuestionKind::binary) continue;
      auto& [pos, neg] = available[q.id];
      if (*a.option_rank >= *q.rank) ++pos;
      else ++neg;
    }
  }

  std::map<std::string, std::pair<std::size_t, std::size_t>> emitted;
  for (const BalancedInstance& inst : instances) {
    auto& [pos, neg] = emitted[inst.question_id];
    if (inst.label) ++pos;
    else ++neg;
  }

  require(!instances.empty(), "no instances emitted");
  for (const auto& [qid, counts] : emitted) {
    const auto& [pos, neg] = counts;
    require(pos == neg, qid + ": emitted " + std::to_string(pos) +
                            " positives vs " + std::to_string(neg) +
                            " negatives");
    const auto avail = available.at(qid);
    const std::size_t expected = std::min(avail.first, avail.second);
    require(pos == expected,
            qid + ": emitted " + std::to_string(pos) + " per class, oracle says " +
                std::to_string(expected));
  }
  // Questions with an empty class emit nothing; everything else must show up.
  for (const auto& [qid, avail] : available) {
    if (avail.first > 0 && avail.second > 0) {
      require(emitted.count(qid) == 1, qid + ": emitted nothing despite both "
                                             "classes being populated");
    } else {
      require(emitted.count(qid) == 0, qid + ": emitted despite an empty class");
    }
  }
}

void criterion_metric_oracles() {
  Rng rng(9009);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<EvalItem> items;
    for (int i = 0; i < 200; ++i) {
      const int pick = int(rng.below(3));
      EvalItem item;
      item.pair_id = "p" + std::to_string(i);
      item.label = pick == 0 ? Label::A : pick == 1 ? Label::B : Label::Tie;
      item.reward_a = double(rng.below(7)) * 0.2;
      item.reward_b = double(rng.below(7)) * 0.2;
      items.push_back(std::move(item));
    }

    double credit = 0.0;
    std::size_t n = 0;
    for (const EvalItem& it : items) {
      if (it.label == Label::Tie) continue;
      ++n;
      if (it.reward_a == it.reward_b) credit += 0.5;
      else if ((it.reward_a > it.reward_b) == (it.label == Label::A)) {
        credit += 1.0;
      }
    }
    require(diff_accuracy(items) == credit / double(n),
            "trial " + std::to_string(trial) + ": diff_accuracy mismatch");

    for (double threshold : {0.0, 0.2, 0.5}) {
      long long score = 0;
      for (const EvalItem& it : items) {
        const double gap = it.reward_a - it.reward_b;
        const Label predicted = std::fabs(gap) <= threshold
                                    ? Label::Tie
                                    : (gap > 0.0 ? Label::A : Label::B);
        if (predicted == it.label) ++score;
        else if (predicted != Label::Tie && it.label != Label::Tie) --score;
      }
      require(tau_with_ties(items, threshold) ==
                  double(score) / double(items.size()),
              "trial " + std::to_string(trial) + ": tau mismatch at threshold " +
                  fmt(threshold));
    }
  }
}

void criterion_determinism() {
  PipelineConfig config;
  config.seed = 606;
  config.world.dims = 2;
  config.world.subdims_per_dim = 2;
  config.world.questions_per_subdim = 3;
  config.n_samples = 400;
  config.n_train_pairs = 2000;
  config.n_dev_pairs = 300;
  config.n_eval_pairs = 500;
  config.training.max_outer_iterations = 200;
  config.training.convergence_epsilon = 1e-4;

  const std::filesystem::path dir_a = scratch_dir("det_a");
  const std::filesystem::path dir_b = scratch_dir("det_b");
  config.out_dir = dir_a;
  run_pipeline(config);
  config.out_dir = dir_b;
  run_pipeline(config);

  for (const std::string name : {"weights.jsonl", "pairs.jsonl", "metrics.json"}) {
    const std::string a = io::read_file(dir_a / name);
    const std::string b = io::read_file(dir_b / name);
    require(a == b, name + " differs between identically seeded runs");
    require(!a.empty(), name + " is empty");
  }
}

}  // namespace

int main() {
  run_criterion(1, "trained weights are nonnegative with zero gate mass",
                criterion_nonnegativity);
  run_criterion(2, "analytic gradient matches central finite differences",
                criterion_gradient);
  run_criterion(3, "held-out sign agreement recovers clean and noisy worlds",
                criterion_weight_recovery);
  run_criterion(4, "mpo emits only dominance-backed pairs, dpo does not",
                criterion_mpo_soundness);
  run_criterion(5, "mpo pairs are a subset of dpo pairs at equal thresholds",
                criterion_mpo_subset);
  run_criterion(6, "reward decomposition sums back to the total",
                criterion_decomposition);
  run_criterion(7, "bundled image weights replay the published example",
                criterion_weight_replay);
  run_criterion(8, "accuracy improves with the question budget",
                criterion_question_count_scaling);
  run_criterion(9, "consistency reads 1.0 clean and tracks planted violations",
                criterion_consistency_metric);
  run_criterion(10, "balanced sampling equalizes classes per question",
                criterion_balanced_sampling);
  run_criterion(11, "accuracy and tau match exhaustive recounts",
                criterion_metric_oracles);
  run_criterion(12, "identically seeded pipelines write identical artifacts",
                criterion_determinism);

  if (g_failures > 0) {
    std::printf("%d of 12 criteria failed\n", g_failures);
    return 1;
  }
  std::printf("all 12 criteria passed\n");
  return 0;
}
