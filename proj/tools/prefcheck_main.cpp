#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "prefcheck/digest.hpp"
#include "prefcheck/errors.hpp"
#include "prefcheck/evalmetrics.hpp"
#include "prefcheck/features.hpp"
#include "prefcheck/ingest.hpp"
#include "prefcheck/io.hpp"
#include "prefcheck/pipeline.hpp"
#include "prefcheck/scoring.hpp"
#include "prefcheck/selection.hpp"
#include "prefcheck/synthlab.hpp"
#include "prefcheck/trainer.hpp"
#include "prefcheck/version.hpp"

namespace {

using namespace prefcheck;

bool g_quiet = false;

void info(const std::string& line) {
  if (!g_quiet) std::cerr << line << '\n';
}

// Reads a file and records it in the manifest's input list.
std::string read_input(const std::string& path, io::Manifest& manifest) {
  std::string content = io::read_file(path);
  manifest.inputs.emplace_back(path, sha256_hex(content));
  return content;
}

std::map<std::string, double> parse_pins(const std::vector<std::string>& raw) {
  std::map<std::string, double> pins;
  for (const std::string& entry : raw) {
    const std::size_t eq = entry.rfind('=');
    if (eq == std::string::npos || eq == 0) {
      throw CLI::ValidationError("--pin", "expected QUESTION_ID=VALUE, got '" +
                                              entry + "'");
    }
    const std::string id = entry.substr(0, eq);
    std::size_t consumed = 0;
    double value = 0.0;
    try {
      value = std::stod(entry.substr(eq + 1), &consumed);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--pin", "'" + entry.substr(eq + 1) +
                                              "' is not a number");
    }
    if (consumed != entry.size() - eq - 1) {
      throw CLI::ValidationError("--pin", "'" + entry.substr(eq + 1) +
                                              "' is not a number");
    }
    pins[id] = value;
  }
  return pins;
}

void apply_init_spec(const std::string& spec, TrainingConfig& config) {
  if (spec == "zeros") {
    config.init = TrainingConfig::Init::zeros;
    return;
  }
  if (spec.rfind("uniform:", 0) == 0) {
    const std::string range = spec.substr(8);
    const std::size_t comma = range.find(',');
    if (comma != std::string::npos) {
      try {
        config.init = TrainingConfig::Init::uniform;
        config.init_low = std::stod(range.substr(0, comma));
        config.init_high = std::stod(range.substr(comma + 1));
        return;
      } catch (const std::exception&) {
        // falls through to the error below
      }
    }
  }
  throw CLI::ValidationError("--init", "expected 'zeros' or 'uniform:LOW,HIGH'");
}

struct IngestValidateArgs {
  std::string schema_path;
  std::string answers_path;
  std::string prefs_path;
  std::string graded_path;
};

void run_ingest_validate(const IngestValidateArgs& args) {
  const ChecklistSchema schema =
      ChecklistSchema::load_file(args.schema_path);
  std::cout << "schema: " << schema.name() << " (" << schema.size()
            << " questions, hash " << schema.content_hash().substr(0, 12)
            << ")\n";
  if (!args.answers_path.empty()) {
    const std::vector<AnswerSet> answers =
        load_answers(io::read_file(args.answers_path), schema);
    // Extraction re-checks gate chains and missing answers.
    extract_all(answers, schema);
    std::cout << "answers: " << answers.size() << " samples ok\n";
  }
  if (!args.prefs_path.empty()) {
    const std::vector<PreferenceRecord> prefs =
        load_preferences(io::read_file(args.prefs_path));
    std::size_t ties = 0;
    for (const PreferenceRecord& rec : prefs) {
      if (derive_label(rec) == Label::Tie) ++ties;
    }
    std::cout << "preferences: " << prefs.size() << " pairs ok (" << ties
              << " ties)\n";
  }
  if (!args.graded_path.empty()) {
    const std::vector<GradedAnnotation> graded =
        load_graded(io::read_file(args.graded_path), schema);
    std::cout << "graded: " << graded.size() << " annotations ok\n";
  }
}

struct IngestBalanceArgs {
  std::string schema_path;
  std::string graded_path;
  std::string out_path;
  std::string summary_path;
  std::uint64_t seed = 0;
};

void run_ingest_balance(const IngestBalanceArgs& args) {
  io::Manifest manifest;
  manifest.subcommand = "ingest balance";
  manifest.seed = args.seed;
  manifest.args = {{"--schema", args.schema_path},
                   {"--graded", args.graded_path},
                   {"--seed", std::to_string(args.seed)}};

  const ChecklistSchema schema =
      ChecklistSchema::parse(read_input(args.schema_path, manifest));
  const std::vector<GradedAnnotation> graded =
      load_graded(read_input(args.graded_path, manifest), schema);
  const auto [instances, summary] = balanced_sample(graded, schema, args.seed);

  std::string out;
  for (const BalancedInstance& inst : instances) {
    nlohmann::ordered_json doc;
    doc["sample_id"] = inst.sample_id;
    doc["question_id"] = inst.question_id;
    doc["label"] = inst.label;
    out += doc.dump();
    out += '\n';
  }
  io::write_with_manifest(args.out_path, out, manifest);
  info("wrote " + std::to_string(instances.size()) + " instances to " +
       args.out_path);

  if (!args.summary_path.empty()) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json per_question = nlohmann::ordered_json::object();
    for (const auto& [id, balance] : summary.per_question) {
      per_question[id] = {{"positives", balance.positives},
                          {"negatives", balance.negatives},
                          {"emitted_per_class", balance.emitted_per_class}};
    }
    doc["per_question"] = std::move(per_question);
    doc["gates_skipped"] = summary.gates_skipped;
    doc["continuous_skipped"] = summary.continuous_skipped;
    doc["not_present_excluded"] = summary.not_present_excluded;
    io::write_with_manifest(args.summary_path, doc.dump(2) + "\n", manifest);
  }
}

struct FeaturesExtractArgs {
  std::string schema_path;
  std::string answers_path;
  std::string out_path;
};

void run_features_extract(const FeaturesExtractArgs& args) {
  io::Manifest manifest;
  manifest.subcommand = "features extract";
  manifest.args = {{"--schema", args.schema_path},
                   {"--answers", args.answers_path}};
  const ChecklistSchema schema =
      ChecklistSchema::parse(read_input(args.schema_path, manifest));
  const std::vector<AnswerSet> answers =
      load_answers(read_input(args.answers_path, manifest), schema);
  const std::vector<FeatureVector> features = extract_all(answers, schema);
  io::write_with_manifest(args.out_path, serialize_features(features), manifest);
  info("extracted " + std::to_string(features.size()) + " feature vectors");
}

struct FeaturesConsistencyArgs {
  std::string schema_path;
  std::string answers_path;
  std::string out_path;
};

void run_features_consistency(const FeaturesConsistencyArgs& args) {
  io::Manifest manifest;
  manifest.subcommand = "features consistency";
  manifest.args = {{"--schema", args.schema_path},
                   {"--answers", args.answers_path}};
  const ChecklistSchema schema =
      ChecklistSchema::parse(read_input(args.schema_path, manifest));
  const std::vector<AnswerSet> answers =
      load_answers(read_input(args.answers_path, manifest), schema);
  const ConsistencyReport report = consistency(answers, schema);
  const std::string text = serialize_consistency(report);
  if (args.out_path.empty()) {
    std::cout << text;
  } else {
    io::write_with_manifest(args.out_path, text, manifest);
  }
}

struct TrainArgs {
  std::string schema_path;
  std::string features_path;
  std::string prefs_path;
  std::string config_path;
  std::string out_path;
  std::string init_spec;
  std::vector<std::string> pins;
  std::optional<std::uint64_t> seed;
  std::optional<double> learning_rate;
  std::optional<double> epsilon;
  std::optional<std::size_t> max_iterations;
  std::string batch;
  bool no_shuffle = false;
  double holdout = 0.0;
};

void run_train(const TrainArgs& args) {
  io::Manifest manifest;
  manifest.subcommand = "train";
  manifest.args = {{"--schema", args.schema_path},
                   {"--features", args.features_path},
                   {"--prefs", args.prefs_path}};

  const ChecklistSchema schema =
      ChecklistSchema::parse(read_input(args.schema_path, manifest));
  const std::vector<FeatureVector> features =
      load_features(read_input(args.features_path, manifest), schema);
  const std::vector<PreferenceRecord> prefs =
      load_preferences(read_input(args.prefs_path, manifest));

  TrainingConfig config;
  if (!args.config_path.empty()) {
    config = training_config_from_json(read_input(args.config_path, manifest));
  }
  if (args.seed) config.seed = *args.seed;
  if (args.learning_rate) config.learning_rate = *args.learning_rate;
  if (args.epsilon) config.convergence_epsilon = *args.epsilon;
  if (args.max_iterations) config.max_outer_iterations = *args.max_iterations;
  if (!args.init_spec.empty()) apply_init_spec(args.init_spec, config);
  if (!args.batch.empty()) {
    if (args.batch == "per_pair") config.batch = TrainingConfig::Batch::per_pair;
    else if (args.batch == "full") config.batch = TrainingConfig::Batch::full;
    else throw CLI::ValidationError("--batch", "expected 'per_pair' or 'full'");
  }
  if (args.no_shuffle) config.shuffle_per_epoch = false;
  for (const auto& [id, value] : parse_pins(args.pins)) config.pins[id] = value;
  manifest.seed = config.seed;

  const PairBuildResult built = make_training_pairs(prefs, features, schema);
  info("built " + std::to_string(built.pairs.size()) + " training pairs (" +
       std::to_string(built.ties_dropped) + " ties dropped)");

  const HoldoutSplit split = split_holdout(built.pairs, args.holdout, config.seed);
  const WeightVector weights = train_weights(
      args.holdout > 0.0 ? split.train : built.pairs, schema, config);
  io::write_with_manifest(args.out_path, serialize_weights(weights, schema),
                          manifest);

  std::cout << (weights.converged ? "converged" : "iteration cap reached")
            << " after " << weights.outer_iterations << " epochs, final loss "
            << io::format_double(weights.final_loss.value_or(0.0)) << "\n";
  if (args.holdout > 0.0 && !split.held.empty()) {
    std::vector<EvalItem> items;
    for (const TrainingPair& pair : split.held) {
      double margin = 0.0;
      for (std::size_t i = 0; i < weights.weights.size(); ++i) {
        margin += weights.weights[i] * pair.diff.values[i];
      }
      items.push_back({"", pair.y == 1 ? Label::A : Label::B, margin, 0.0});
    }
    std::cout << "holdout_accuracy=" << io::format_double(diff_accuracy(items))
              << " n=" << items.size() << "\n";
  }
}

struct ScoreArgs {
  std::string schema_path;
  std::string weights_path;
  std::string features_path;
  std::string out_path;
  std::string format = "jsonl";
};

void run_score(const ScoreArgs& args) {
  io::Manifest manifest;
  manifest.subcommand = "score";
  manifest.args = {{"--schema", args.schema_path},
                   {"--weights", args.weights_path},
                   {"--features", args.features_path},
                   {"--format", args.format}};
  const ChecklistSchema schema =
      ChecklistSchema::parse(read_input(args.schema_path, manifest));
  const WeightVector weights =
      load_weights(read_input(args.weights_path, manifest), schema);
  const std::vector<FeatureVector> features =
      load_features(read_input(args.features_path, manifest), schema);
  const std::vector<RewardReport> reports =
      score_batch(features, weights, schema);
  const std::string text = args.format == "csv"
                               ? reports_to_csv(reports, schema)
                               : serialize_reports(reports);
  io::write_with_manifest(args.out_path, text, manifest);
  info("scored " + std::to_string(reports.size()) + " samples");
}

struct SelectArgs {
  std::string reports_path;
  std::string out_path;
  std::string stats_path;
  std::string mode = "mpo";
  std::string granularity = "dimension";
  double threshold = 0.0;
  std::optional<std::size_t> max_pairs;
};

void run_select(const SelectArgs& args) {
  io::Manifest manifest;
  manifest.subcommand = "select";
  manifest.args = {{"--reports", args.reports_path},
                   {"--mode", args.mode},
                   {"--granularity", args.granularity},
                   {"--threshold", io::format_double(args.threshold)}};

  SelectionConfig config;
  config.mode = selection_mode_from_string(args.mode);
  config.granularity = granularity_from_string(args.granularity);
  config.threshold = args.threshold;
  config.max_pairs_per_prompt = args.max_pairs;

  const std::vector<RewardReport> reports =
      load_reports(read_input(args.reports_path, manifest));
  const std::vector<CandidateGroup> groups = group_by_prompt(reports);
  const std::vector<SelectedPair> pairs = select_pairs(groups, config);
  const SelectionStats stats = selection_stats(pairs, groups, config);

  io::write_with_manifest(args.out_path, serialize_pairs(pairs), manifest);
  if (!args.stats_path.empty()) {
    io::write_with_manifest(args.stats_path, serialize_stats(stats, config),
                            manifest);
  }
  info("selected " + std::to_string(pairs.size()) + " pairs from " +
       std::to_string(groups.size()) + " prompts");
}

struct EvalArgs {
  std::string reports_path;
  std::string reports_a_path;
  std::string reports_b_path;
  std::string labels_path;
  std::string dev_labels_path;
  std::string out_path;
  bool drop_prediction_ties = false;
};

void run_eval(const EvalArgs& args) {
  io::Manifest manifest;
  manifest.subcommand = "eval";
  manifest.args = {{"--labels", args.labels_path},
                   {"--dev-labels", args.dev_labels_path}};
  // Reports arrive as one merged file or as a winner-side/loser-side
  // split; either way the join to labels is by sample id.
  std::vector<RewardReport> reports;
  if (!args.reports_path.empty()) {
    manifest.args.emplace_back("--reports", args.reports_path);
    reports = load_reports(read_input(args.reports_path, manifest));
  }
  const std::pair<const char*, const std::string*> sides[] = {
      {"--reports-a", &args.reports_a_path}, {"--reports-b", &args.reports_b_path}};
  for (const auto& [flag, path] : sides) {
    if (path->empty()) continue;
    manifest.args.emplace_back(flag, *path);
    for (RewardReport& r : load_reports(read_input(*path, manifest))) {
      reports.push_back(std::move(r));
    }
  }
  const std::vector<PreferenceRecord> labels =
      load_preferences(read_input(args.labels_path, manifest));
  const std::vector<PreferenceRecord> dev_labels =
      load_preferences(read_input(args.dev_labels_path, manifest));
  const MetricsReport metrics =
      evaluate(build_eval_items(labels, reports),
               build_eval_items(dev_labels, reports), args.drop_prediction_ties);
  const std::string text = serialize_metrics(metrics);
  io::write_with_manifest(args.out_path, text, manifest);
  std::cout << text;
}

struct SynthWorldArgs {
  std::uint64_t seed = 0;
  std::string out_path;
  std::string schema_out_path;
  WorldConfig config;
};

void run_synth_world(const SynthWorldArgs& args) {
  io::Manifest manifest;
  manifest.subcommand = "synth world";
  manifest.seed = args.seed;
  WorldConfig config = args.config;
  config.seed = args.seed;
  const SyntheticWorld world = gen_world(config);
  io::write_with_manifest(args.out_path, serialize_world(world), manifest);
  if (!args.schema_out_path.empty()) {
    io::write_with_manifest(args.schema_out_path, world.schema.serialize(),
                            manifest);
  }
  info("world with " + std::to_string(world.schema.size()) + " questions");
}

struct SynthSamplesArgs {
  std::string world_path;
  std::size_t n = 0;
  std::string out_path;
};

void run_synth_samples(const SynthSamplesArgs& args) {
  io::Manifest manifest;
  manifest.subcommand = "synth samples";
  manifest.args = {{"--world", args.world_path},
                   {"--n", std::to_string(args.n)}};
  const SyntheticWorld world = load_world(read_input(args.world_path, manifest));
  const std::vector<AnswerSet> samples = gen_samples(world, args.n);
  io::write_with_manifest(args.out_path,
                          serialize_answers(samples, world.schema), manifest);
  info("sampled " + std::to_string(samples.size()) + " answer sets");
}

struct SynthPrefsArgs {
  std::string world_path;
  std::string answers_path;
  std::size_t n_pairs = 0;
  double flip_rate = 0.0;
  std::string out_path;
};

void run_synth_prefs(const SynthPrefsArgs& args) {
  io::Manifest manifest;
  manifest.subcommand = "synth prefs";
  manifest.args = {{"--world", args.world_path},
                   {"--answers", args.answers_path},
                   {"--n-pairs", std::to_string(args.n_pairs)}};
  const SyntheticWorld world = load_world(read_input(args.world_path, manifest));
  const std::vector<AnswerSet> answers =
      load_answers(read_input(args.answers_path, manifest), world.schema);
  const std::vector<PreferenceRecord> prefs =
      gen_preferences(world, answers, args.n_pairs, args.flip_rate);
  io::write_with_manifest(args.out_path, serialize_preferences(prefs), manifest);
  info("generated " + std::to_string(prefs.size()) + " preference pairs");
}

struct PipelineArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void run_pipeline_cmd(const PipelineArgs& args) {
  PipelineConfig config =
      pipeline_config_from_json(io::read_file(args.config_path));
  if (args.seed) config.seed = *args.seed;
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  const PipelineResult result =
      run_pipeline(config, g_quiet ? nullptr : &std::cerr);
  std::cout << serialize_metrics(result.metrics);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"checklist-based preference reward engine"};
  app.set_version_flag("--version", prefcheck::kVersion);
  app.require_subcommand(1);
  // Option callbacks fire before subcommand callbacks, so the level is in
  // force by the time any command runs.
  app.add_option_function<std::string>(
         "--log-level",
         [](const std::string& v) { g_quiet = v == "quiet"; },
         "quiet or info")
      ->check(CLI::IsMember({"quiet", "info"}));

  CLI::App* ingest = app.add_subcommand("ingest", "validate or resample inputs");
  ingest->require_subcommand(1);

  IngestValidateArgs iv;
  CLI::App* ingest_validate =
      ingest->add_subcommand("validate", "check inputs against a schema");
  ingest_validate->add_option("--schema", iv.schema_path)->required();
  ingest_validate->add_option("--answers", iv.answers_path);
  ingest_validate->add_option("--prefs", iv.prefs_path);
  ingest_validate->add_option("--graded", iv.graded_path);
  ingest_validate->callback([&] { run_ingest_validate(iv); });

  IngestBalanceArgs ib;
  CLI::App* ingest_balance = ingest->add_subcommand(
      "balance", "build a class-balanced yes/no corpus from graded annotations");
  ingest_balance->add_option("--schema", ib.schema_path)->required();
  ingest_balance->add_option("--graded", ib.graded_path)->required();
  ingest_balance->add_option("--seed", ib.seed)->required();
  ingest_balance->add_option("--out", ib.out_path)->required();
  ingest_balance->add_option("--summary-out", ib.summary_path);
  ingest_balance->callback([&] { run_ingest_balance(ib); });

  CLI::App* features_cmd =
      app.add_subcommand("features", "feature extraction and consistency");
  features_cmd->require_subcommand(1);

  FeaturesExtractArgs fe;
  CLI::App* features_extract =
      features_cmd->add_subcommand("extract", "answers to feature vectors");
  features_extract->add_option("--schema", fe.schema_path)->required();
  features_extract->add_option("--answers", fe.answers_path)->required();
  features_extract->add_option("--out", fe.out_path)->required();
  features_extract->callback([&] { run_features_extract(fe); });

  FeaturesConsistencyArgs fc;
  CLI::App* features_consistency = features_cmd->add_subcommand(
      "consistency", "ladder consistency rates per dimension");
  features_consistency->add_option("--schema", fc.schema_path)->required();
  features_consistency->add_option("--answers", fc.answers_path)->required();
  features_consistency->add_option("--out", fc.out_path);
  features_consistency->callback([&] { run_features_consistency(fc); });

  TrainArgs tr;
  CLI::App* train_cmd =
      app.add_subcommand("train", "fit checklist weights from preferences");
  train_cmd->add_option("--schema", tr.schema_path)->required();
  train_cmd->add_option("--features", tr.features_path)->required();
  train_cmd->add_option("--prefs", tr.prefs_path)->required();
  train_cmd->add_option("--out", tr.out_path)->required();
  train_cmd->add_option("--config", tr.config_path, "training config JSON");
  train_cmd->add_option("--seed", tr.seed);
  train_cmd->add_option("--lr", tr.learning_rate, "learning rate");
  train_cmd->add_option("--epsilon", tr.epsilon, "convergence epsilon");
  train_cmd->add_option("--max-iter", tr.max_iterations);
  train_cmd->add_option("--init", tr.init_spec, "zeros or uniform:LOW,HIGH");
  train_cmd->add_option("--batch", tr.batch, "per_pair or full");
  train_cmd->add_flag("--no-shuffle", tr.no_shuffle);
  train_cmd->add_option("--pin", tr.pins,
                        "QUESTION_ID=VALUE, holds a weight fixed");
  train_cmd->add_option("--holdout", tr.holdout,
                        "fraction of pairs held out for evaluation")
      ->check(CLI::Range(0.0, 0.999));
  train_cmd->callback([&] { run_train(tr); });

  ScoreArgs sc;
  CLI::App* score_cmd = app.add_subcommand("score", "reward reports for samples");
  score_cmd->add_option("--schema", sc.schema_path)->required();
  score_cmd->add_option("--weights", sc.weights_path)->required();
  score_cmd->add_option("--features", sc.features_path)->required();
  score_cmd->add_option("--out", sc.out_path)->required();
  score_cmd->add_option("--format", sc.format)
      ->check(CLI::IsMember({"jsonl", "csv"}));
  score_cmd->callback([&] { run_score(sc); });

  SelectArgs se;
  CLI::App* select_cmd =
      app.add_subcommand("select", "pick training pairs from scored candidates");
  select_cmd->add_option("--reports", se.reports_path)->required();
  select_cmd->add_option("--out", se.out_path)->required();
  select_cmd->add_option("--stats-out", se.stats_path);
  select_cmd->add_option("--mode", se.mode)->check(CLI::IsMember({"dpo", "mpo"}));
  select_cmd->add_option("--granularity", se.granularity)
      ->check(CLI::IsMember({"dimension", "sub_dimension", "question"}));
  select_cmd->add_option("--threshold", se.threshold);
  select_cmd->add_option("--max-pairs-per-prompt", se.max_pairs);
  select_cmd->callback([&] { run_select(se); });

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "accuracy and tau metrics");
  eval_cmd->add_option("--reports", ev.reports_path, "merged reports file");
  CLI::Option* ev_side_a = eval_cmd->add_option("--reports-a", ev.reports_a_path,
                                                "winner-side reports file");
  CLI::Option* ev_side_b = eval_cmd->add_option("--reports-b", ev.reports_b_path,
                                                "loser-side reports file");
  ev_side_a->needs(ev_side_b);
  ev_side_b->needs(ev_side_a);
  eval_cmd->add_option("--labels", ev.labels_path)->required();
  eval_cmd->add_option("--dev-labels", ev.dev_labels_path)->required();
  eval_cmd->add_option("--out", ev.out_path)->required();
  eval_cmd->add_flag("--drop-prediction-ties", ev.drop_prediction_ties);
  eval_cmd->callback([&] {
    if (ev.reports_path.empty() && ev.reports_a_path.empty()) {
      throw CLI::RequiredError("--reports or --reports-a/--reports-b");
    }
    run_eval(ev);
  });

  CLI::App* synth = app.add_subcommand("synth", "synthetic data laboratory");
  synth->require_subcommand(1);

  SynthWorldArgs sw;
  CLI::App* synth_world = synth->add_subcommand("world", "generate a world");
  synth_world->add_option("--seed", sw.seed)->required();
  synth_world->add_option("--out", sw.out_path)->required();
  synth_world->add_option("--schema-out", sw.schema_out_path);
  synth_world->add_option("--dims", sw.config.dims);
  synth_world->add_option("--subdims", sw.config.subdims_per_dim);
  synth_world->add_option("--questions", sw.config.questions_per_subdim);
  synth_world->add_option("--gate-fraction", sw.config.gate_fraction);
  synth_world->add_option("--noise", sw.config.annotator_noise);
  synth_world->add_option("--violations", sw.config.consistency_violation_rate);
  synth_world->add_option("--sparsity", sw.config.weight_sparsity);
  synth_world->add_flag("--alignment", sw.config.continuous_alignment);
  synth_world->add_option("--candidates-per-prompt",
                          sw.config.candidates_per_prompt);
  synth_world->add_option("--absent-probability", sw.config.absent_probability);
  synth_world->callback([&] { run_synth_world(sw); });

  SynthSamplesArgs ss;
  CLI::App* synth_samples = synth->add_subcommand("samples", "draw answer sets");
  synth_samples->add_option("--world", ss.world_path)->required();
  synth_samples->add_option("--n", ss.n)->required();
  synth_samples->add_option("--out", ss.out_path)->required();
  synth_samples->callback([&] { run_synth_samples(ss); });

  SynthPrefsArgs sp;
  CLI::App* synth_prefs =
      synth->add_subcommand("prefs", "draw labeled preference pairs");
  synth_prefs->add_option("--world", sp.world_path)->required();
  synth_prefs->add_option("--answers", sp.answers_path)->required();
  synth_prefs->add_option("--n-pairs", sp.n_pairs)->required();
  synth_prefs->add_option("--flip-rate", sp.flip_rate)
      ->check(CLI::Range(0.0, 1.0));
  synth_prefs->add_option("--out", sp.out_path)->required();
  synth_prefs->callback([&] { run_synth_prefs(sp); });

  PipelineArgs pl;
  CLI::App* pipeline_cmd =
      app.add_subcommand("pipeline", "synthetic end-to-end run");
  pipeline_cmd->add_option("--config", pl.config_path)->required();
  pipeline_cmd->add_option("--seed", pl.seed, "overrides the config seed");
  pipeline_cmd->add_option("--out-dir", pl.out_dir, "overrides the config out_dir");
  pipeline_cmd->callback([&] { run_pipeline_cmd(pl); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const prefcheck::Error& e) {
    std::cerr << "error[" << e.code() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
