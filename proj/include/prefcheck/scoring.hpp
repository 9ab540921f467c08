#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prefcheck/checklist.hpp"
#include "prefcheck/features.hpp"
#include "prefcheck/trainer.hpp"

namespace prefcheck {

// Decomposed reward for one sample. The total is the weighted sum of
// unmasked feature values; the per-dimension, per-sub-dimension, and
// per-question maps partition the same contributions, so each level sums
// back to the total. Masked questions contribute exactly 0 and are listed
// in masked_questions.
struct RewardReport {
  std::string sample_id;
  std::optional<std::string> prompt_id;
  double total = 0.0;
  std::map<std::string, double> by_dimension;
  std::map<std::string, double> by_sub_dimension;
  std::map<std::string, double> by_question;
  std::vector<std::string> masked_questions;
  std::string schema_hash;
  std::string weights_fingerprint;
};

// Scores one feature vector. SchemaMismatch unless features, weights, and
// schema all share the same content hash.
RewardReport score(const FeatureVector& features, const WeightVector& weights,
                   const ChecklistSchema& schema);

// Scores a batch in input order; a failure is rethrown with the offending
// position prepended.
std::vector<RewardReport> score_batch(const std::vector<FeatureVector>& features,
                                      const WeightVector& weights,
                                      const ChecklistSchema& schema);

std::string serialize_reports(const std::vector<RewardReport>& reports);
std::vector<RewardReport> load_reports(const std::string& text);

// Flat export: one row per sample with the total and the per-dimension
// columns in schema order. There is no loader for this form; it drops the
// finer breakdowns.
std::string reports_to_csv(const std::vector<RewardReport>& reports,
                           const ChecklistSchema& schema);

}  // namespace prefcheck
