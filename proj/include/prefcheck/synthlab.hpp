#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prefcheck/checklist.hpp"
#include "prefcheck/ingest.hpp"
#include "prefcheck/trainer.hpp"

namespace prefcheck {

struct WorldConfig {
  std::size_t dims = 1;
  std::size_t subdims_per_dim = 1;
  std::size_t questions_per_subdim = 2;
  std::uint64_t seed = 0;
  // Chance that a sub-dimension is led by a presence gate. A gated
  // sub-dimension spends one of its questions on the gate, so the total
  // question count stays dims * subdims_per_dim * questions_per_subdim.
  double gate_fraction = 0.25;
  // Probability of flipping each ladder answer when sampling annotators.
  double annotator_noise = 0.0;
  // Target fraction of eligible (sample, sub-dimension) groups carrying a
  // planted ladder violation. Planting is by exact quota, not per-group
  // coin flips, so the realized rate matches to within one group.
  double consistency_violation_rate = 0.0;
  // Fraction of ranked questions whose true weight is exactly 0.
  double weight_sparsity = 0.25;
  // Adds one continuous prompt-alignment question in its own dimension.
  bool continuous_alignment = false;
  std::size_t candidates_per_prompt = 4;
  // Chance a gated attribute is absent from a sample.
  double absent_probability = 0.2;
};

// A generated schema plus the hidden ground truth that samples and
// preference labels are drawn from.
struct SyntheticWorld {
  ChecklistSchema schema;
  std::vector<double> true_weights;
  WorldConfig config;
};

SyntheticWorld gen_world(const WorldConfig& config);
SyntheticWorld gen_world(std::size_t dims, std::size_t subdims_per_dim,
                         std::size_t questions_per_subdim, std::uint64_t seed);

// Draws n answer sets. Each sample picks a satisfied level per ladder
// (yes up to the level, no above it), applies annotator noise, then a
// quota of ladder violations. Samples are grouped into prompts of
// config.candidates_per_prompt. Deterministic per (seed, n) and
// independent per sample index.
std::vector<AnswerSet> gen_samples(const SyntheticWorld& world, std::size_t n);

// Draws labeled pairs. The label is the sign of the true-weight margin on
// the feature difference: exactly 0 labels a Tie. label_flip_rate flips
// non-tie labels to simulate annotator error. InsufficientSamples unless
// at least two samples exist.
std::vector<PreferenceRecord> gen_preferences(const SyntheticWorld& world,
                                              const std::vector<AnswerSet>& samples,
                                              std::size_t n_pairs,
                                              double label_flip_rate = 0.0);

// The ground truth packaged for the scoring path.
WeightVector true_weight_vector(const SyntheticWorld& world);

std::string serialize_world(const SyntheticWorld& world);
SyntheticWorld load_world(const std::string& text);

}  // namespace prefcheck
