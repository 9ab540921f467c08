#include "prefcheck/checklist.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "prefcheck/digest.hpp"
#include "prefcheck/errors.hpp"
#include "prefcheck/io.hpp"

namespace prefcheck {

using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<std::size_t> ChecklistSchema::kEmptyLadder{};

namespace {

const json& require(const json& obj, const char* field, const char* where) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw ParseError(std::string(where) + ": missing field '" + field + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* field,
                           const char* where) {
  const json& v = require(obj, field, where);
  if (!v.is_string()) {
    throw ParseError(std::string(where) + ": field '" + field +
                     "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

ChecklistSchema::ChecklistSchema(std::string name,
                                 std::vector<DimensionDecl> dimensions,
                                 std::vector<Question> questions)
    : name_(std::move(name)),
      dimensions_(std::move(dimensions)),
      questions_(std::move(questions)) {
  validate_and_index();
  content_hash_ = sha256_hex(serialize());
}

ChecklistSchema ChecklistSchema::parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("schema: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("schema: document must be an object");

  std::string name = require_string(doc, "name", "schema");

  const json& dims = require(doc, "dimensions", "schema");
  if (!dims.is_array()) {
    throw ParseError("schema: field 'dimensions' must be an array");
  }
  std::vector<DimensionDecl> dimensions;
  for (const json& d : dims) {
    if (!d.is_object()) {
      throw ParseError("schema: dimension entries must be objects");
    }
    DimensionDecl decl;
    decl.name = require_string(d, "dimension", "dimension entry");
    const json& subs = require(d, "sub_dimensions", "dimension entry");
    if (!subs.is_array()) {
      throw ParseError("dimension entry: field 'sub_dimensions' must be an array");
    }
    for (const json& s : subs) {
      if (!s.is_string()) {
        throw ParseError("dimension entry: sub-dimension names must be strings");
      }
      decl.sub_dimensions.push_back(s.get<std::string>());
    }
    dimensions.push_back(std::move(decl));
  }

  const json& qs = require(doc, "questions", "schema");
  if (!qs.is_array()) {
    throw ParseError("schema: field 'questions' must be an array");
  }
  std::vector<Question> questions;
  for (const json& q : qs) {
    if (!q.is_object()) {
      throw ParseError("schema: question entries must be objects");
    }
    Question question;
    question.id = require_string(q, "id", "question");
    const char* where = question.id.empty() ? "question" : question.id.c_str();
    question.text = require_string(q, "text", where);
    question.dimension = require_string(q, "dimension", where);
    question.sub_dimension = require_string(q, "sub_dimension", where);
    std::string kind = require_string(q, "kind", where);
    if (kind == "binary") {
      question.kind = QuestionKind::binary;
    } else if (kind == "continuous") {
      question.kind = QuestionKind::continuous;
    } else {
      throw ParseError(std::string(where) + ": kind must be 'binary' or 'continuous'");
    }
    if (auto it = q.find("rank"); it != q.end() && !it->is_null()) {
      if (!it->is_number_integer()) {
        throw ParseError(std::string(where) + ": rank must be an integer");
      }
      question.rank = it->get<int>();
    }
    if (auto it = q.find("gate"); it != q.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw ParseError(std::string(where) + ": gate must be a question id");
      }
      question.gate = it->get<std::string>();
    }
    questions.push_back(std::move(question));
  }

  return ChecklistSchema(std::move(name), std::move(dimensions),
                         std::move(questions));
}

ChecklistSchema ChecklistSchema::load_file(const std::filesystem::path& path) {
  return parse(io::read_file(path));
}

void ChecklistSchema::validate_and_index() {
  if (name_.empty()) throw ValidationError("schema name must be nonempty");

  std::set<std::string> dim_names;
  std::map<std::string, std::string> dim_of_sub;  // sub-dimension -> dimension
  for (const DimensionDecl& d : dimensions_) {
    if (d.name.empty()) throw ValidationError("dimension name must be nonempty");
    if (!dim_names.insert(d.name).second) {
      throw ValidationError("duplicate dimension '" + d.name + "'");
    }
    for (const std::string& s : d.sub_dimensions) {
      if (s.empty()) throw ValidationError("sub-dimension name must be nonempty");
      // Graded annotations address sub-dimensions without qualifying the
      // dimension, so names must be unique across the whole schema.
      if (!dim_of_sub.emplace(s, d.name).second) {
        throw ValidationError("duplicate sub-dimension '" + s + "'");
      }
      sub_dimension_order_.push_back(s);
    }
  }

  for (std::size_t i = 0; i < questions_.size(); ++i) {
    const Question& q = questions_[i];
    if (q.id.empty()) throw ValidationError("question id must be nonempty");
    if (!index_by_id_.emplace(q.id, i).second) {
      throw ValidationError("duplicate question id '" + q.id + "'");
    }
    auto sub_it = dim_of_sub.find(q.sub_dimension);
    if (sub_it == dim_of_sub.end()) {
      throw ValidationError("question '" + q.id +
                            "' references undeclared sub-dimension '" +
                            q.sub_dimension + "'");
    }
    if (sub_it->second != q.dimension) {
      throw ValidationError("question '" + q.id + "' places sub-dimension '" +
                            q.sub_dimension + "' under dimension '" +
                            q.dimension + "' but it is declared under '" +
                            sub_it->second + "'");
    }
    if (q.rank && *q.rank < 0) {
      throw ValidationError("question '" + q.id + "' has negative rank");
    }
    if (!q.rank && q.kind == QuestionKind::continuous) {
      throw ValidationError("question '" + q.id +
                            "' is continuous and unranked; gates must be binary");
    }
    if (q.kind == QuestionKind::continuous) {
      if (continuous_) {
        throw ValidationError("schema declares more than one continuous question ('" +
                              questions_[*continuous_].id + "' and '" + q.id + "')");
      }
      continuous_ = i;
    }
  }

  gate_index_.assign(questions_.size(), std::nullopt);
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    const Question& q = questions_[i];
    if (!q.gate) continue;
    auto it = index_by_id_.find(*q.gate);
    if (it == index_by_id_.end()) {
      throw ValidationError("question '" + q.id +
                            "' has dangling gate reference '" + *q.gate + "'");
    }
    const Question& target = questions_[it->second];
    if (!target.is_gate() || target.kind != QuestionKind::binary) {
      throw ValidationError("question '" + q.id + "' gates on '" + *q.gate +
                            "', which is not an unranked binary question");
    }
    gate_index_[i] = it->second;
  }

  // Gate edges form a forest (each node has at most one parent), so a cycle
  // is exactly a chain that revisits itself. 0 = unvisited, 1 = on the
  // current chain, 2 = cleared.
  std::vector<int> color(questions_.size(), 0);
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    if (color[i] != 0) continue;
    std::vector<std::size_t> chain;
    std::size_t cur = i;
    while (true) {
      if (color[cur] == 1) {
        throw ValidationError("gate cycle through '" + questions_[cur].id + "'");
      }
      if (color[cur] == 2) break;
      color[cur] = 1;
      chain.push_back(cur);
      if (!gate_index_[cur]) break;
      cur = *gate_index_[cur];
    }
    for (std::size_t c : chain) color[c] = 2;
  }

  for (std::size_t i = 0; i < questions_.size(); ++i) {
    const Question& q = questions_[i];
    if (q.rank) ladders_[q.sub_dimension].push_back(i);
  }
  for (auto& [sub, indices] : ladders_) {
    std::sort(indices.begin(), indices.end(), [this](std::size_t a, std::size_t b) {
      return *questions_[a].rank < *questions_[b].rank;
    });
    for (std::size_t r = 0; r < indices.size(); ++r) {
      if (*questions_[indices[r]].rank != int(r)) {
        throw ValidationError("ranks in sub-dimension '" + sub +
                              "' must be contiguous from 0");
      }
    }
  }
}

std::string ChecklistSchema::serialize() const {
  ordered_json doc;
  doc["name"] = name_;
  ordered_json dims = ordered_json::array();
  for (const DimensionDecl& d : dimensions_) {
    ordered_json entry;
    entry["dimension"] = d.name;
    entry["sub_dimensions"] = d.sub_dimensions;
    dims.push_back(std::move(entry));
  }
  doc["dimensions"] = std::move(dims);
  ordered_json qs = ordered_json::array();
  for (const Question& q : questions_) {
    ordered_json entry;
    entry["id"] = q.id;
    entry["text"] = q.text;
    entry["dimension"] = q.dimension;
    entry["sub_dimension"] = q.sub_dimension;
    entry["kind"] = q.kind == QuestionKind::binary ? "binary" : "continuous";
    if (q.rank) entry["rank"] = *q.rank;
    if (q.gate) entry["gate"] = *q.gate;
    qs.push_back(std::move(entry));
  }
  doc["questions"] = std::move(qs);
  return doc.dump(2) + "\n";
}

std::size_t ChecklistSchema::question_index(const std::string& id) const {
  auto it = index_by_id_.find(id);
  if (it == index_by_id_.end()) {
    throw UnknownQuestion("no question with id '" + id + "'");
  }
  return it->second;
}

const Question* ChecklistSchema::find(const std::string& id) const {
  auto it = index_by_id_.find(id);
  return it == index_by_id_.end() ? nullptr : &questions_[it->second];
}

const std::vector<std::size_t>& ChecklistSchema::ladder(
    const std::string& sub_dimension) const {
  auto it = ladders_.find(sub_dimension);
  return it == ladders_.end() ? kEmptyLadder : it->second;
}

std::optional<std::size_t> ChecklistSchema::gate_of(std::size_t q) const {
  return gate_index_.at(q);
}

}  // namespace prefcheck
