#include "prefcheck/pipeline.hpp"

#include <json.hpp>

#include "prefcheck/digest.hpp"
#include "prefcheck/errors.hpp"
#include "prefcheck/features.hpp"
#include "prefcheck/io.hpp"
#include "prefcheck/scoring.hpp"

namespace prefcheck {

using nlohmann::json;

PipelineConfig pipeline_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("pipeline config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError("pipeline config: document must be an object");
  }

  PipelineConfig config;
  try {
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("out_dir")) {
      config.out_dir = doc["out_dir"].get<std::string>();
    }
    if (doc.contains("n_samples")) {
      config.n_samples = doc["n_samples"].get<std::size_t>();
    }
    if (doc.contains("n_train_pairs")) {
      config.n_train_pairs = doc["n_train_pairs"].get<std::size_t>();
    }
    if (doc.contains("n_dev_pairs")) {
      config.n_dev_pairs = doc["n_dev_pairs"].get<std::size_t>();
    }
    if (doc.contains("n_eval_pairs")) {
      config.n_eval_pairs = doc["n_eval_pairs"].get<std::size_t>();
    }
    if (doc.contains("label_flip_rate")) {
      config.label_flip_rate = doc["label_flip_rate"].get<double>();
    }
    if (doc.contains("drop_prediction_ties")) {
      config.drop_prediction_ties = doc["drop_prediction_ties"].get<bool>();
    }
    if (doc.contains("world")) {
      const json& w = doc["world"];
      WorldConfig& c = config.world;
      if (w.contains("dims")) c.dims = w["dims"].get<std::size_t>();
      if (w.contains("subdims_per_dim")) {
        c.subdims_per_dim = w["subdims_per_dim"].get<std::size_t>();
      }
      if (w.contains("questions_per_subdim")) {
        c.questions_per_subdim = w["questions_per_subdim"].get<std::size_t>();
      }
      if (w.contains("gate_fraction")) {
        c.gate_fraction = w["gate_fraction"].get<double>();
      }
      if (w.contains("annotator_noise")) {
        c.annotator_noise = w["annotator_noise"].get<double>();
      }
      if (w.contains("consistency_violation_rate")) {
        c.consistency_violation_rate =
            w["consistency_violation_rate"].get<double>();
      }
      if (w.contains("weight_sparsity")) {
        c.weight_sparsity = w["weight_sparsity"].get<double>();
      }
      if (w.contains("continuous_alignment")) {
        c.continuous_alignment = w["continuous_alignment"].get<bool>();
      }
      if (w.contains("candidates_per_prompt")) {
        c.candidates_per_prompt = w["candidates_per_prompt"].get<std::size_t>();
      }
      if (w.contains("absent_probability")) {
        c.absent_probability = w["absent_probability"].get<double>();
      }
    }
    if (doc.contains("training")) {
      const json& t = doc["training"];
      TrainingConfig& c = config.training;
      if (t.contains("learning_rate")) {
        c.learning_rate = t["learning_rate"].get<double>();
      }
      if (t.contains("convergence_epsilon")) {
        c.convergence_epsilon = t["convergence_epsilon"].get<double>();
      }
      if (t.contains("max_outer_iterations")) {
        c.max_outer_iterations = t["max_outer_iterations"].get<std::size_t>();
      }
      if (t.contains("shuffle_per_epoch")) {
        c.shuffle_per_epoch = t["shuffle_per_epoch"].get<bool>();
      }
      if (t.contains("batch")) {
        const std::string b = t["batch"].get<std::string>();
        if (b == "per_pair") c.batch = TrainingConfig::Batch::per_pair;
        else if (b == "full") c.batch = TrainingConfig::Batch::full;
        else throw ParseError("pipeline config: batch must be 'per_pair' or 'full'");
      }
    }
    if (doc.contains("selection")) {
      const json& s = doc["selection"];
      SelectionConfig& c = config.selection;
      if (s.contains("mode")) {
        c.mode = selection_mode_from_string(s["mode"].get<std::string>());
      }
      if (s.contains("granularity")) {
        c.granularity =
            granularity_from_string(s["granularity"].get<std::string>());
      }
      if (s.contains("threshold")) c.threshold = s["threshold"].get<double>();
      if (s.contains("max_pairs_per_prompt")) {
        c.max_pairs_per_prompt = s["max_pairs_per_prompt"].get<std::size_t>();
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("pipeline config: ") + e.what());
  }
  return config;
}

namespace {

void emit(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

void write_artifact(const std::filesystem::path& dir, const char* name,
                    const std::string& content, std::uint64_t seed,
                    std::vector<std::pair<std::string, std::string>> inputs) {
  io::Manifest manifest;
  manifest.subcommand = "pipeline";
  manifest.seed = seed;
  manifest.inputs = std::move(inputs);
  io::write_with_manifest(dir / name, content, manifest);
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* log) {
  if (config.out_dir.empty()) {
    throw ValidationError("pipeline config needs an out_dir");
  }
  if (config.n_train_pairs == 0 || config.n_dev_pairs == 0 ||
      config.n_eval_pairs == 0) {
    throw ValidationError("pipeline needs nonzero train, dev, and eval pair counts");
  }

  WorldConfig world_config = config.world;
  world_config.seed = config.seed;
  SyntheticWorld world = gen_world(world_config);
  emit(log, "world: " + std::to_string(world.schema.size()) + " questions");

  const std::vector<AnswerSet> samples = gen_samples(world, config.n_samples);
  const std::vector<PreferenceRecord> prefs = gen_preferences(
      world, samples,
      config.n_train_pairs + config.n_dev_pairs + config.n_eval_pairs,
      config.label_flip_rate);
  const std::vector<PreferenceRecord> train_prefs(
      prefs.begin(), prefs.begin() + std::ptrdiff_t(config.n_train_pairs));
  const std::vector<PreferenceRecord> dev_prefs(
      prefs.begin() + std::ptrdiff_t(config.n_train_pairs),
      prefs.begin() + std::ptrdiff_t(config.n_train_pairs + config.n_dev_pairs));
  const std::vector<PreferenceRecord> eval_prefs(
      prefs.begin() + std::ptrdiff_t(config.n_train_pairs + config.n_dev_pairs),
      prefs.end());
  emit(log, "sampled " + std::to_string(samples.size()) + " answer sets, " +
                std::to_string(prefs.size()) + " preference pairs");

  const std::vector<FeatureVector> features = extract_all(samples, world.schema);

  TrainingConfig training = config.training;
  training.seed = derive_seed(config.seed, "training");
  const PairBuildResult built =
      make_training_pairs(train_prefs, features, world.schema);
  const WeightVector weights =
      train_weights(built.pairs, world.schema, training);
  emit(log, "trained on " + std::to_string(built.pairs.size()) + " pairs (" +
                std::to_string(built.ties_dropped) + " ties dropped), " +
                (weights.converged ? "converged" : "hit the iteration cap") +
                " after " + std::to_string(weights.outer_iterations) +
                " epochs");

  const std::vector<RewardReport> reports =
      score_batch(features, weights, world.schema);

  const std::vector<CandidateGroup> groups = group_by_prompt(reports);
  const std::vector<SelectedPair> pairs = select_pairs(groups, config.selection);
  const SelectionStats stats = selection_stats(pairs, groups, config.selection);
  emit(log, "selected " + std::to_string(pairs.size()) + " pairs from " +
                std::to_string(groups.size()) + " prompts");

  const std::vector<EvalItem> eval_items = build_eval_items(eval_prefs, reports);
  const std::vector<EvalItem> dev_items = build_eval_items(dev_prefs, reports);
  const MetricsReport metrics =
      evaluate(eval_items, dev_items, config.drop_prediction_ties);
  const ConsistencyReport consistency_report = consistency(samples, world.schema);

  const std::filesystem::path& dir = config.out_dir;
  const std::uint64_t seed = config.seed;
  const std::string schema_text = world.schema.serialize();
  const std::string world_text = serialize_world(world);
  const std::string answers_text = serialize_answers(samples, world.schema);
  const std::string features_text = serialize_features(features);
  const std::string weights_text = serialize_weights(weights, world.schema);
  const std::string reports_text = serialize_reports(reports);
  const std::string pairs_text = serialize_pairs(pairs);

  const std::pair<std::string, std::string> schema_input{
      "schema.json", sha256_hex(schema_text)};
  write_artifact(dir, "schema.json", schema_text, seed, {});
  write_artifact(dir, "world.json", world_text, seed, {schema_input});
  write_artifact(dir, "answers.jsonl", answers_text, seed, {schema_input});
  write_artifact(dir, "features.jsonl", features_text, seed,
                 {schema_input, {"answers.jsonl", sha256_hex(answers_text)}});
  write_artifact(dir, "weights.jsonl", weights_text, seed,
                 {schema_input, {"features.jsonl", sha256_hex(features_text)}});
  write_artifact(dir, "reports.jsonl", reports_text, seed,
                 {schema_input, {"weights.jsonl", sha256_hex(weights_text)}});
  write_artifact(dir, "pairs.jsonl", pairs_text, seed,
                 {{"reports.jsonl", sha256_hex(reports_text)}});
  write_artifact(dir, "selection_stats.json",
                 serialize_stats(stats, config.selection), seed,
                 {{"pairs.jsonl", sha256_hex(pairs_text)}});
  write_artifact(dir, "consistency.json",
                 serialize_consistency(consistency_report), seed,
                 {{"answers.jsonl", sha256_hex(answers_text)}});
  write_artifact(dir, "metrics.json", serialize_metrics(metrics), seed,
                 {{"reports.jsonl", sha256_hex(reports_text)}});
  emit(log, "wrote artifacts to " + dir.string());

  PipelineResult result;
  result.world = std::move(world);
  result.weights = weights;
  result.selection = stats;
  result.metrics = metrics;
  result.consistency = consistency_report;
  return result;
}

}  // namespace prefcheck
