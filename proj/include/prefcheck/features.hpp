#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prefcheck/checklist.hpp"
#include "prefcheck/ingest.hpp"

namespace prefcheck {

// One sample's feature vector in schema question order. masked[i] marks
// entries pinned to 0 because the question is a gate or sits behind a gate
// answered "no"; a masked value is always exactly 0.
struct FeatureVector {
  std::string sample_id;
  std::optional<std::string> prompt_id;
  std::string schema_hash;
  std::vector<double> values;
  std::vector<std::uint8_t> masked;
};

// Difference of two feature vectors. An entry masked in either input is
// masked here and its value is exactly 0.
struct DiffVector {
  std::string schema_hash;
  std::vector<double> values;
  std::vector<std::uint8_t> masked;
};

// Maps answers to features: 1 for "yes", 0 for "no", the raw value for the
// continuous question. Gate questions themselves contribute a masked 0.
// Applicability follows gate chains: a question whose gate (or any
// ancestor gate) answered "no" is masked. MissingAnswer if an applicable
// question has no answer; SchemaMismatch if an answer references a
// question outside the schema.
FeatureVector extract_features(const AnswerSet& answers,
                               const ChecklistSchema& schema);

std::vector<FeatureVector> extract_all(const std::vector<AnswerSet>& answers,
                                       const ChecklistSchema& schema);

// a - b with mask union. SchemaMismatch on hash disagreement,
// DimensionMismatch on length disagreement.
DiffVector feature_diff(const FeatureVector& a, const FeatureVector& b);

std::string serialize_features(const std::vector<FeatureVector>& features);
std::vector<FeatureVector> load_features(const std::string& text,
                                         const ChecklistSchema& schema);

struct GroupRate {
  std::size_t consistent = 0;
  std::size_t total = 0;

  // Undefined (nullopt) when no group qualified.
  std::optional<double> rate() const {
    if (total == 0) return std::nullopt;
    return double(consistent) / double(total);
  }
};

// Ladder-consistency report. A (sample, sub-dimension) group qualifies
// when at least two ranked binary questions are applicable; it is
// consistent when the "yes" answers form a prefix of the ladder (no
// stricter question passes after a weaker one failed). Dimension and
// overall rates pool groups, so sub-dimensions with more graded samples
// weigh more.
struct ConsistencyReport {
  GroupRate overall;
  std::map<std::string, GroupRate> by_dimension;
  std::map<std::string, GroupRate> by_sub_dimension;
};

ConsistencyReport consistency(const std::vector<AnswerSet>& answers,
                              const ChecklistSchema& schema);

std::string serialize_consistency(const ConsistencyReport& report);

}  // namespace prefcheck
