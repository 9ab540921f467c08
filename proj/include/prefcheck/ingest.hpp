#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prefcheck/checklist.hpp"

namespace prefcheck {

// "yes"/"no" for binary questions, a value in [0, 1] for the continuous one.
using AnswerValue = std::variant<bool, double>;

// All recorded answers for one sample. Questions gated off may be absent;
// every other question must be answered before features can be extracted.
struct AnswerSet {
  std::string sample_id;
  std::optional<std::string> prompt_id;
  std::map<std::string, AnswerValue> answers;

  bool operator==(const AnswerSet&) const = default;
};

enum class Label { A, B, Tie };

std::string to_string(Label label);
Label label_from_string(const std::string& text);

// One pairwise comparison. Carries raw annotator scores (1..5, higher
// favors sample_a), an already-derived label, or both.
struct PreferenceRecord {
  std::string pair_id;
  std::string sample_a;
  std::string sample_b;
  std::vector<int> annotator_scores;
  std::optional<Label> label;
};

// A graded per-sub-dimension annotation: the strongest ladder option the
// sample satisfies. option_rank -1 means even the weakest option fails;
// nullopt records "not_present" (the gated attribute is absent).
struct GradedAnnotation {
  std::string sample_id;
  std::string sub_dimension;
  std::optional<int> option_rank;
};

// One yes/no training instance emitted by balanced sampling.
struct BalancedInstance {
  std::string sample_id;
  std::string question_id;
  bool label = false;

  bool operator==(const BalancedInstance&) const = default;
};

struct QuestionBalance {
  std::size_t positives = 0;  // available before balancing
  std::size_t negatives = 0;
  std::size_t emitted_per_class = 0;
};

struct BalanceSummary {
  std::map<std::string, QuestionBalance> per_question;
  std::size_t gates_skipped = 0;
  std::size_t continuous_skipped = 0;
  std::size_t not_present_excluded = 0;
};

// Loaders parse one JSON record per line and validate against the schema.
// Diagnostics carry 1-based line numbers.
std::vector<AnswerSet> load_answers(const std::string& text,
                                    const ChecklistSchema& schema);
std::string serialize_answers(const std::vector<AnswerSet>& answers,
                              const ChecklistSchema& schema);

std::vector<PreferenceRecord> load_preferences(const std::string& text);
std::string serialize_preferences(const std::vector<PreferenceRecord>& records);

std::vector<GradedAnnotation> load_graded(const std::string& text,
                                          const ChecklistSchema& schema);
std::string serialize_graded(const std::vector<GradedAnnotation>& annotations);

// Majority vote over annotator scores in exact integer arithmetic: mean
// above 3 prefers A, below 3 prefers B, exactly 3 ties. A stored label
// wins over scores. EmptyScores when neither is present.
Label derive_label(const PreferenceRecord& record);

// Builds a class-balanced yes/no corpus per ranked binary question. For
// the question at rank r, samples graded at option_rank >= r are positives
// and the rest negatives; "not_present" annotations are excluded. The
// majority class is down-sampled by a seeded uniform draw to match the
// minority exactly. Output order and content depend only on the multiset
// of annotations and the seed, never on input order.
std::pair<std::vector<BalancedInstance>, BalanceSummary> balanced_sample(
    const std::vector<GradedAnnotation>& annotations,
    const ChecklistSchema& schema, std::uint64_t seed);

}  // namespace prefcheck
