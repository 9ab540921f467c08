#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prefcheck/checklist.hpp"
#include "prefcheck/features.hpp"
#include "prefcheck/ingest.hpp"

namespace prefcheck {

struct TrainingConfig {
  double learning_rate = 0.1;
  double convergence_epsilon = 1e-6;
  std::size_t max_outer_iterations = 10000;
  enum class Init { zeros, uniform } init = Init::zeros;
  double init_low = 0.0;
  double init_high = 0.0;
  std::uint64_t seed = 0;
  bool shuffle_per_epoch = true;
  // per_pair follows the reference procedure (one step per pair);
  // full applies the mean gradient once per epoch, as a diagnostic.
  enum class Batch { per_pair, full } batch = Batch::per_pair;
  // Question id -> weight held fixed for the whole run.
  std::map<std::string, double> pins;
};

// One training example: feature difference of a pair and y = 1 when the
// first element of the pair was preferred, 0 otherwise.
struct TrainingPair {
  DiffVector diff;
  int y = 1;
};

// Learned weights in schema question order. Invariants: every weight is
// finite and >= 0; gate questions carry exactly 0.
struct WeightVector {
  std::string schema_hash;
  std::vector<double> weights;
  bool converged = false;
  std::size_t outer_iterations = 0;
  std::optional<double> final_loss;
  std::string trained_on;  // fingerprint of the training pairs
  std::optional<TrainingConfig> config;
};

// Logistic function, computed so that sigmoid(m) + sigmoid(-m) == 1 holds
// bitwise for every finite m. That makes training invariant, bit for bit,
// under flipping every pair (a,b,y) -> (b,a,1-y).
double sigmoid(double margin);

// Negative log-likelihood of one pair under weights w; numerically stable
// for margins of any magnitude. DimensionMismatch on length disagreement.
double logistic_loss(const DiffVector& diff, int y, const WeightVector& w);

// Gradient of logistic_loss with respect to w: (sigmoid(m) - y) * diff.
std::vector<double> loss_gradient(const DiffVector& diff, int y,
                                  const WeightVector& w);

// Iterative masked logistic regression: repeat { update w on every pair,
// then clamp negative coordinates to 0 } until the epoch-over-epoch
// L2 movement drops to convergence_epsilon or the iteration cap is hit.
// Gates and pinned questions never move. EmptyDataset without pairs;
// NonFiniteLoss if the weights leave the finite range.
WeightVector train_weights(const std::vector<TrainingPair>& pairs,
                           const ChecklistSchema& schema,
                           const TrainingConfig& config);

struct PairBuildResult {
  std::vector<TrainingPair> pairs;
  std::size_t ties_dropped = 0;
};

// Joins preference records with extracted features and derives labels.
// Tie-labeled records carry no direction and are dropped (counted).
PairBuildResult make_training_pairs(const std::vector<PreferenceRecord>& records,
                                    const std::vector<FeatureVector>& features,
                                    const ChecklistSchema& schema);

// Seeded split for holdout evaluation; fraction in [0, 1) of pairs go to
// `held`. Deterministic for a given seed and input order.
struct HoldoutSplit {
  std::vector<TrainingPair> train;
  std::vector<TrainingPair> held;
};
HoldoutSplit split_holdout(const std::vector<TrainingPair>& pairs,
                           double fraction, std::uint64_t seed);

// Content identity of a weight vector (schema hash plus exact values).
std::string weights_fingerprint(const WeightVector& w);

// Parses a JSON training-config document; absent fields keep defaults.
TrainingConfig training_config_from_json(const std::string& text);

std::string serialize_weights(const WeightVector& w,
                              const ChecklistSchema& schema);
WeightVector load_weights(const std::string& text,
                          const ChecklistSchema& schema);

}  // namespace prefcheck
