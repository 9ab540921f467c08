#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prefcheck/checklist.hpp"
#include "prefcheck/features.hpp"
#include "prefcheck/ingest.hpp"
#include "prefcheck/scoring.hpp"
#include "prefcheck/trainer.hpp"

namespace prefcheck {

// One labeled pair with both model rewards attached.
struct EvalItem {
  std::string pair_id;
  Label label = Label::A;
  double reward_a = 0.0;
  double reward_b = 0.0;
};

// Fraction of non-tie-labeled items where the reward gap points at the
// labeled winner; an exactly zero gap earns half credit. With
// drop_prediction_ties, zero-gap items are removed instead. NoScorableItems
// when nothing remains.
double diff_accuracy(const std::vector<EvalItem>& items,
                     bool drop_prediction_ties = false);

// Tie-aware rank correlation in [-1, 1] over all items: the model predicts
// Tie when |gap| <= tie_threshold, else the sign of the gap. An exact
// three-way match counts +1, a strict reversal (A vs B) counts -1, and any
// mismatch involving a tie on one side only counts 0; the sum is divided
// by the item count.
double tau_with_ties(const std::vector<EvalItem>& items, double tie_threshold);

// Sweeps 200 evenly spaced thresholds from 0 to the 99th percentile of
// |gap| on the dev items and returns the one maximizing tau_with_ties
// (smallest wins a tie). EmptyDataset on an empty dev set.
double calibrate_tie_threshold(const std::vector<EvalItem>& dev_items);

struct MetricsReport {
  std::size_t n_total = 0;        // items received
  std::size_t n_scored = 0;       // items diff_accuracy was computed over
  double diff_accuracy = 0.0;
  double tau = 0.0;
  double tie_threshold = 0.0;
  bool drop_prediction_ties = false;
};

// diff_accuracy plus tau at a threshold calibrated on `dev_items`.
MetricsReport evaluate(const std::vector<EvalItem>& items,
                       const std::vector<EvalItem>& dev_items,
                       bool drop_prediction_ties = false);

std::string serialize_metrics(const MetricsReport& report);

struct SizeAccuracy {
  std::size_t size = 0;
  double accuracy = 0.0;
};

// diff_accuracy as a function of checklist size: for each requested size
// s, keep only the s questions with the largest trained weight magnitude
// (equal magnitudes broken by a seeded shuffle), zero the rest, rescore,
// and evaluate against the labeled pairs. SizeTooLarge if a size exceeds
// the question count.
std::vector<SizeAccuracy> accuracy_vs_question_count(
    const std::vector<AnswerSet>& corpus,
    const std::vector<PreferenceRecord>& records, const WeightVector& weights,
    const ChecklistSchema& schema, const std::vector<std::size_t>& sizes,
    std::uint64_t seed);

// Joins labeled records with scored totals; ValidationError when a record
// references a sample that has no report.
std::vector<EvalItem> build_eval_items(const std::vector<PreferenceRecord>& records,
                                       const std::vector<RewardReport>& reports);

}  // namespace prefcheck
