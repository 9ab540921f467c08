#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prefcheck/scoring.hpp"

namespace prefcheck {

enum class Granularity { dimension, sub_dimension, question };
enum class SelectionMode { dpo, mpo };

Granularity granularity_from_string(const std::string& text);
std::string to_string(Granularity g);
SelectionMode selection_mode_from_string(const std::string& text);
std::string to_string(SelectionMode m);

struct SelectionConfig {
  SelectionMode mode = SelectionMode::mpo;
  Granularity granularity = Granularity::dimension;
  double threshold = 0.0;  // minimum total gap, raw reward scale
  std::optional<std::size_t> max_pairs_per_prompt;
};

// All scored candidates for one prompt.
struct CandidateGroup {
  std::string prompt_id;
  std::vector<RewardReport> candidates;
};

// a dominates b iff a is at least as good on every unit of the chosen
// granularity and strictly better in total. SchemaMismatch when the
// reports carry different weight fingerprints; MissingBreakdown when a
// report lacks the breakdown the granularity needs.
bool dominates(const RewardReport& a, const RewardReport& b, Granularity g);

struct SelectedPair {
  std::string prompt_id;
  std::string winner_id;
  std::string loser_id;
  double total_gap = 0.0;

  bool operator==(const SelectedPair&) const = default;
};

// Emits ordered pairs (winner, loser) within one group. dpo keeps every
// pair whose total gap is positive and at least the threshold; mpo
// additionally requires dominance. Pairs come out sorted by descending
// gap (ties by winner then loser id) and are cut to max_pairs_per_prompt.
std::vector<SelectedPair> select_pairs(const CandidateGroup& group,
                                       const SelectionConfig& config);

std::vector<SelectedPair> select_pairs(const std::vector<CandidateGroup>& groups,
                                       const SelectionConfig& config);

// Post-hoc audit of emitted pairs: how many are backed by dominance at
// the config granularity, how many are not, and the per-prompt counts.
struct SelectionStats {
  std::size_t pairs_emitted = 0;
  std::size_t dominated_count = 0;
  std::size_t not_dominated_count = 0;
  std::map<std::string, std::size_t> per_prompt;
};

SelectionStats selection_stats(const std::vector<SelectedPair>& pairs,
                               const std::vector<CandidateGroup>& groups,
                               const SelectionConfig& config);

// Reports grouped by prompt_id in first-appearance order; reports without
// a prompt_id form singleton groups keyed by their sample_id.
std::vector<CandidateGroup> group_by_prompt(const std::vector<RewardReport>& reports);

std::string serialize_pairs(const std::vector<SelectedPair>& pairs);
std::vector<SelectedPair> load_pairs(const std::string& text);
std::string serialize_stats(const SelectionStats& stats,
                            const SelectionConfig& config);

}  // namespace prefcheck
