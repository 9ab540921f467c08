#include "prefcheck/ingest.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "prefcheck/digest.hpp"
#include "prefcheck/errors.hpp"
#include "prefcheck/io.hpp"
#include "prefcheck/rng.hpp"

namespace prefcheck {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string at_line(std::size_t line_no, const std::string& message) {
  return "line " + std::to_string(line_no) + ": " + message;
}

json parse_record(const std::string& line, std::size_t line_no) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(at_line(line_no, e.what()));
  }
  if (!doc.is_object()) {
    throw ParseError(at_line(line_no, "record must be a JSON object"));
  }
  return doc;
}

std::string require_string(const json& obj, const char* field,
                           std::size_t line_no) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw ParseError(at_line(line_no, std::string("field '") + field +
                                          "' must be a string"));
  }
  return it->get<std::string>();
}

}  // namespace

std::string to_string(Label label) {
  switch (label) {
    case Label::A: return "A";
    case Label::B: return "B";
    case Label::Tie: return "Tie";
  }
  throw ValidationError("unreachable label");
}

Label label_from_string(const std::string& text) {
  if (text == "A") return Label::A;
  if (text == "B") return Label::B;
  if (text == "Tie") return Label::Tie;
  throw ParseError("label must be 'A', 'B', or 'Tie', got '" + text + "'");
}

std::vector<AnswerSet> load_answers(const std::string& text,
                                    const ChecklistSchema& schema) {
  std::vector<AnswerSet> out;
  std::set<std::string> seen_ids;
  const std::vector<std::string> lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t line_no = i + 1;
    json doc = parse_record(lines[i], line_no);

    AnswerSet set;
    set.sample_id = require_string(doc, "sample_id", line_no);
    if (!seen_ids.insert(set.sample_id).second) {
      throw ValidationError(at_line(line_no, "duplicate sample_id '" +
                                                 set.sample_id + "'"));
    }
    if (auto it = doc.find("prompt_id"); it != doc.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw ParseError(at_line(line_no, "field 'prompt_id' must be a string"));
      }
      set.prompt_id = it->get<std::string>();
    }
    auto answers_it = doc.find("answers");
    if (answers_it == doc.end() || !answers_it->is_object()) {
      throw ParseError(at_line(line_no, "field 'answers' must be an object"));
    }
    for (const auto& [id, value] : answers_it->items()) {
      const Question* q = schema.find(id);
      if (!q) {
        throw UnknownQuestion(at_line(line_no, "unknown question '" + id + "'"));
      }
      if (q->kind == QuestionKind::binary) {
        if (!value.is_string() ||
            (value.get<std::string>() != "yes" &&
             value.get<std::string>() != "no")) {
          throw ParseError(at_line(line_no, "answer for '" + id +
                                                "' must be \"yes\" or \"no\""));
        }
        set.answers.emplace(id, value.get<std::string>() == "yes");
      } else {
        if (!value.is_number()) {
          throw ParseError(at_line(line_no, "answer for '" + id +
                                                "' must be a number"));
        }
        double v = value.get<double>();
        if (!(v >= 0.0 && v <= 1.0)) {
          throw OutOfRangeValue(at_line(
              line_no, "answer " + io::format_double(v) + " for '" + id +
                           "' is outside [0, 1]"));
        }
        set.answers.emplace(id, v);
      }
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::string serialize_answers(const std::vector<AnswerSet>& answers,
                              const ChecklistSchema& schema) {
  std::string out;
  for (const AnswerSet& set : answers) {
    ordered_json doc;
    doc["sample_id"] = set.sample_id;
    if (set.prompt_id) doc["prompt_id"] = *set.prompt_id;
    ordered_json vals = ordered_json::object();
    // Canonical question order, so equal answer sets serialize identically.
    for (const Question& q : schema.questions()) {
      auto it = set.answers.find(q.id);
      if (it == set.answers.end()) continue;
      if (const bool* b = std::get_if<bool>(&it->second)) {
        vals[q.id] = *b ? "yes" : "no";
      } else {
        vals[q.id] = std::get<double>(it->second);
      }
    }
    doc["answers"] = std::move(vals);
    out += doc.dump();
    out += '\n';
  }
  return out;
}

std::vector<PreferenceRecord> load_preferences(const std::string& text) {
  std::vector<PreferenceRecord> out;
  const std::vector<std::string> lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t line_no = i + 1;
    json doc = parse_record(lines[i], line_no);

    PreferenceRecord rec;
    rec.pair_id = require_string(doc, "pair_id", line_no);
    rec.sample_a = require_string(doc, "sample_a", line_no);
    rec.sample_b = require_string(doc, "sample_b", line_no);
    if (auto it = doc.find("annotator_scores"); it != doc.end() && !it->is_null()) {
      if (!it->is_array()) {
        throw ParseError(at_line(line_no, "field 'annotator_scores' must be an array"));
      }
      for (const json& s : *it) {
        if (!s.is_number_integer()) {
          throw ParseError(at_line(line_no, "annotator scores must be integers"));
        }
        int score = s.get<int>();
        if (score < 1 || score > 5) {
          throw OutOfRangeValue(at_line(line_no, "annotator score " +
                                                     std::to_string(score) +
                                                     " is outside [1, 5]"));
        }
        rec.annotator_scores.push_back(score);
      }
    }
    if (auto it = doc.find("label"); it != doc.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw ParseError(at_line(line_no, "field 'label' must be a string"));
      }
      try {
        rec.label = label_from_string(it->get<std::string>());
      } catch (const ParseError& e) {
        throw ParseError(at_line(line_no, e.what()));
      }
    }
    if (rec.annotator_scores.empty() && !rec.label) {
      throw ParseError(at_line(
          line_no, "record needs 'annotator_scores' or 'label'"));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string serialize_preferences(const std::vector<PreferenceRecord>& records) {
  std::string out;
  for (const PreferenceRecord& rec : records) {
    ordered_json doc;
    doc["pair_id"] = rec.pair_id;
    doc["sample_a"] = rec.sample_a;
    doc["sample_b"] = rec.sample_b;
    if (!rec.annotator_scores.empty()) doc["annotator_scores"] = rec.annotator_scores;
    if (rec.label) doc["label"] = to_string(*rec.label);
    out += doc.dump();
    out += '\n';
  }
  return out;
}

namespace {

// Ranked binary questions of a sub-dimension, rank ascending.
std::vector<std::size_t> binary_ladder(const ChecklistSchema& schema,
                                       const std::string& sub_dimension) {
  std::vector<std::size_t> out;
  for (std::size_t idx : schema.ladder(sub_dimension)) {
    if (schema.questions()[idx].kind == QuestionKind::binary) out.push_back(idx);
  }
  return out;
}

bool sub_dimension_is_gated(const ChecklistSchema& schema,
                            const std::vector<std::size_t>& ladder) {
  return std::any_of(ladder.begin(), ladder.end(), [&](std::size_t idx) {
    return schema.gate_of(idx).has_value();
  });
}

}  // namespace

std::vector<GradedAnnotation> load_graded(const std::string& text,
                                          const ChecklistSchema& schema) {
  std::set<std::string> known_subs(schema.sub_dimension_order().begin(),
                                   schema.sub_dimension_order().end());
  std::vector<GradedAnnotation> out;
  const std::vector<std::string> lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t line_no = i + 1;
    json doc = parse_record(lines[i], line_no);

    GradedAnnotation ann;
    ann.sample_id = require_string(doc, "sample_id", line_no);
    ann.sub_dimension = require_string(doc, "sub_dimension", line_no);
    if (!known_subs.count(ann.sub_dimension)) {
      throw ValidationError(at_line(line_no, "unknown sub-dimension '" +
                                                 ann.sub_dimension + "'"));
    }
    const std::vector<std::size_t> ladder = binary_ladder(schema, ann.sub_dimension);

    auto it = doc.find("option_rank");
    if (it == doc.end()) {
      throw ParseError(at_line(line_no, "field 'option_rank' is required"));
    }
    if (it->is_string() && it->get<std::string>() == "not_present") {
      if (!sub_dimension_is_gated(schema, ladder)) {
        throw ValidationError(at_line(
            line_no, "'not_present' is only valid for gated sub-dimensions, "
                     "and '" + ann.sub_dimension + "' is not gated"));
      }
      ann.option_rank = std::nullopt;
    } else if (it->is_number_integer()) {
      if (ladder.empty()) {
        throw ValidationError(at_line(line_no, "sub-dimension '" +
                                                   ann.sub_dimension +
                                                   "' has no ranked binary questions"));
      }
      int rank = it->get<int>();
      // -1 grades the sample below the weakest option.
      if (rank < -1 || rank >= int(ladder.size())) {
        throw OutOfRangeValue(at_line(
            line_no, "option_rank " + std::to_string(rank) + " is outside [-1, " +
                         std::to_string(ladder.size() - 1) + "] for '" +
                         ann.sub_dimension + "'"));
      }
      ann.option_rank = rank;
    } else {
      throw ParseError(at_line(
          line_no, "field 'option_rank' must be an integer or \"not_present\""));
    }
    out.push_back(std::move(ann));
  }
  return out;
}

std::string serialize_graded(const std::vector<GradedAnnotation>& annotations) {
  std::string out;
  for (const GradedAnnotation& ann : annotations) {
    ordered_json doc;
    doc["sample_id"] = ann.sample_id;
    doc["sub_dimension"] = ann.sub_dimension;
    if (ann.option_rank) {
      doc["option_rank"] = *ann.option_rank;
    } else {
      doc["option_rank"] = "not_present";
    }
    out += doc.dump();
    out += '\n';
  }
  return out;
}

Label derive_label(const PreferenceRecord& record) {
  if (record.label) return *record.label;
  if (record.annotator_scores.empty()) {
    throw EmptyScores("pair '" + record.pair_id + "' has no annotator scores");
  }
  // Integer comparison of sum against 3n; no rounding can flip a tie.
  long long sum = 0;
  for (int s : record.annotator_scores) {
    if (s < 1 || s > 5) {
      throw OutOfRangeValue("annotator score " + std::to_string(s) +
                            " is outside [1, 5]");
    }
    sum += s;
  }
  const long long neutral = 3ll * (long long)record.annotator_scores.size();
  if (sum > neutral) return Label::A;
  if (sum < neutral) return Label::B;
  return Label::Tie;
}

std::pair<std::vector<BalancedInstance>, BalanceSummary> balanced_sample(
    const std::vector<GradedAnnotation>& annotations,
    const ChecklistSchema& schema, std::uint64_t seed) {
  BalanceSummary summary;
  for (const Question& q : schema.questions()) {
    if (q.is_gate()) ++summary.gates_skipped;
    else if (q.kind == QuestionKind::continuous) ++summary.continuous_skipped;
  }

  // (sample_id, option_rank) per sub-dimension, canonically sorted so the
  // seeded down-sampling below cannot see the input order.
  std::map<std::string, std::vector<std::pair<std::string, int>>> groups;
  for (const GradedAnnotation& ann : annotations) {
    if (!ann.option_rank) {
      ++summary.not_present_excluded;
      continue;
    }
    groups[ann.sub_dimension].emplace_back(ann.sample_id, *ann.option_rank);
  }
  for (auto& [sub, entries] : groups) std::sort(entries.begin(), entries.end());

  std::vector<BalancedInstance> instances;
  for (const std::string& sub : schema.sub_dimension_order()) {
    std::vector<std::size_t> ladder;
    for (std::size_t idx : schema.ladder(sub)) {
      if (schema.questions()[idx].kind == QuestionKind::binary) ladder.push_back(idx);
    }
    const auto group_it = groups.find(sub);
    for (std::size_t r = 0; r < ladder.size(); ++r) {
      const std::string& qid = schema.questions()[ladder[r]].id;
      QuestionBalance& balance = summary.per_question[qid];
      if (group_it == groups.end()) continue;

      std::vector<const std::string*> pos, neg;
      for (const auto& [sample_id, rank] : group_it->second) {
        (rank >= int(r) ? pos : neg).push_back(&sample_id);
      }
      balance.positives = pos.size();
      balance.negatives = neg.size();
      if (pos.empty() || neg.empty()) continue;

      const std::size_t k = std::min(pos.size(), neg.size());
      balance.emitted_per_class = k;
      Rng rng(derive_seed(seed, "balance:" + qid));
      std::vector<const std::string*>& majority = pos.size() > neg.size() ? pos : neg;
      rng.shuffle(majority);
      majority.resize(k);

      std::vector<BalancedInstance> emitted;
      for (const std::string* s : neg) emitted.push_back({*s, qid, false});
      for (const std::string* s : pos) emitted.push_back({*s, qid, true});
      std::sort(emitted.begin(), emitted.end(),
                [](const BalancedInstance& a, const BalancedInstance& b) {
                  return std::tie(a.sample_id, a.label) <
                         std::tie(b.sample_id, b.label);
                });
      instances.insert(instances.end(), emitted.begin(), emitted.end());
    }
  }
  return {std::move(instances), std::move(summary)};
}

}  // namespace prefcheck
