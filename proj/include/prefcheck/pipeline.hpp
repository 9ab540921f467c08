#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>

#include "prefcheck/evalmetrics.hpp"
#include "prefcheck/selection.hpp"
#include "prefcheck/synthlab.hpp"
#include "prefcheck/trainer.hpp"

namespace prefcheck {

// One synthetic end-to-end run: world -> samples -> preferences ->
// features -> training -> scoring -> selection -> evaluation, with every
// artifact written under out_dir. The run seed overrides the world and
// training seeds so a single value pins the whole run.
struct PipelineConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  WorldConfig world;
  std::size_t n_samples = 400;
  std::size_t n_train_pairs = 2000;
  std::size_t n_dev_pairs = 300;
  std::size_t n_eval_pairs = 500;
  double label_flip_rate = 0.0;
  TrainingConfig training;
  SelectionConfig selection;
  bool drop_prediction_ties = false;
};

PipelineConfig pipeline_config_from_json(const std::string& text);

struct PipelineResult {
  SyntheticWorld world;
  WeightVector weights;
  SelectionStats selection;
  MetricsReport metrics;
  ConsistencyReport consistency;
};

// Runs all stages and writes schema.json, world.json, answers.jsonl,
// features.jsonl, weights.jsonl, reports.jsonl, pairs.jsonl,
// selection_stats.json, consistency.json, and metrics.json (plus
// manifests) under config.out_dir. Given equal configs, two runs produce
// byte-identical artifacts. `log`, when given, receives one progress line
// per stage.
PipelineResult run_pipeline(const PipelineConfig& config,
                            std::ostream* log = nullptr);

}  // namespace prefcheck
