#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prefcheck {

enum class QuestionKind { binary, continuous };

// One checklist question. Ranked questions carry `rank` (0 = weakest in
// their sub-dimension ladder); gate questions have no rank and exist only
// to switch their dependents on or off. `gate` names the question whose
// "no" answer masks this one.
struct Question {
  std::string id;
  std::string text;
  std::string dimension;
  std::string sub_dimension;
  QuestionKind kind = QuestionKind::binary;
  std::optional<int> rank;
  std::optional<std::string> gate;

  bool is_gate() const { return !rank.has_value(); }

  bool operator==(const Question&) const = default;
};

struct DimensionDecl {
  std::string name;
  std::vector<std::string> sub_dimensions;

  bool operator==(const DimensionDecl&) const = default;
};

// A validated checklist. Question order is canonical: it fixes the feature
// vector index order, survives serialization round-trips, and feeds the
// content hash that ties downstream artifacts to this exact schema.
class ChecklistSchema {
 public:
  ChecklistSchema() = default;
  ChecklistSchema(std::string name, std::vector<DimensionDecl> dimensions,
                  std::vector<Question> questions);

  // Parses and validates a schema document. ParseError on malformed JSON
  // or missing/ill-typed fields; ValidationError naming the first violated
  // rule otherwise.
  static ChecklistSchema parse(const std::string& text);
  static ChecklistSchema load_file(const std::filesystem::path& path);

  // Canonical serialization; parse(serialize()) reproduces the schema
  // field for field. The content hash is the SHA-256 of this text.
  std::string serialize() const;

  const std::string& name() const { return name_; }
  const std::string& content_hash() const { return content_hash_; }
  const std::vector<DimensionDecl>& dimensions() const { return dimensions_; }
  const std::vector<Question>& questions() const { return questions_; }
  std::size_t size() const { return questions_.size(); }

  // Feature-vector index of a question id; UnknownQuestion if absent.
  std::size_t question_index(const std::string& id) const;
  const Question* find(const std::string& id) const;

  // Ranked question indices of one sub-dimension, rank ascending (weakest
  // first). Empty for sub-dimensions holding only gates.
  const std::vector<std::size_t>& ladder(const std::string& sub_dimension) const;

  // Sub-dimension names in declaration order.
  const std::vector<std::string>& sub_dimension_order() const {
    return sub_dimension_order_;
  }

  // Index of the gate directly guarding question `q`, if any.
  std::optional<std::size_t> gate_of(std::size_t q) const;

  // The single continuous question, if the schema declares one.
  std::optional<std::size_t> continuous_index() const { return continuous_; }

  bool operator==(const ChecklistSchema& other) const {
    return name_ == other.name_ && dimensions_ == other.dimensions_ &&
           questions_ == other.questions_;
  }

 private:
  void validate_and_index();

  std::string name_;
  std::vector<DimensionDecl> dimensions_;
  std::vector<Question> questions_;
  std::string content_hash_;
  std::map<std::string, std::size_t> index_by_id_;
  std::map<std::string, std::vector<std::size_t>> ladders_;
  std::vector<std::string> sub_dimension_order_;
  std::vector<std::optional<std::size_t>> gate_index_;
  std::optional<std::size_t> continuous_;
  static const std::vector<std::size_t> kEmptyLadder;
};

}  // namespace prefcheck
