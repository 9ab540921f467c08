#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace prefcheck {

// Base of every library error. `code()` is the stable machine-readable
// identifier printed by the CLI; `what()` carries the human diagnostic.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define PREFCHECK_ERROR(NAME)                          \
  struct NAME : Error {                                \
    explicit NAME(const std::string& message)          \
        : Error(#NAME, message) {}                     \
  }

// Malformed input document (bad syntax, wrong field types).
PREFCHECK_ERROR(ParseError);
// Well-formed input that violates a semantic rule; message names the rule.
PREFCHECK_ERROR(ValidationError);
// A question id that does not exist in the schema.
PREFCHECK_ERROR(UnknownQuestion);
// A numeric value outside its documented range.
PREFCHECK_ERROR(OutOfRangeValue);
// A required answer is absent and its question is not gated off.
PREFCHECK_ERROR(MissingAnswer);
// Artifacts built against different schemas (content hash disagreement).
PREFCHECK_ERROR(SchemaMismatch);
// Vector lengths disagree where they must match.
PREFCHECK_ERROR(DimensionMismatch);
// An operation that needs data received none.
PREFCHECK_ERROR(EmptyDataset);
// A preference record with no annotator scores to aggregate.
PREFCHECK_ERROR(EmptyScores);
// Training produced a non-finite loss or weight; aborts the run.
PREFCHECK_ERROR(NonFiniteLoss);
// A reward report lacks the breakdown a comparison granularity requires.
PREFCHECK_ERROR(MissingBreakdown);
// Every evaluation item was dropped; no accuracy can be computed.
PREFCHECK_ERROR(NoScorableItems);
// A requested subset size exceeds the number of questions.
PREFCHECK_ERROR(SizeTooLarge);
// Pair generation needs at least two samples.
PREFCHECK_ERROR(InsufficientSamples);
// Filesystem failure (open, write, rename).
PREFCHECK_ERROR(IoError);

#undef PREFCHECK_ERROR

}  // namespace prefcheck
