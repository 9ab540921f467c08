#include "prefcheck/features.hpp"

#include <json.hpp>

#include "prefcheck/errors.hpp"
#include "prefcheck/io.hpp"

namespace prefcheck {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Resolves gate-chain applicability for one answer set. A question is
// applicable iff its gate (if any) is itself applicable and answered
// "yes". Memoized; the schema guarantees the gate graph is acyclic. A gate
// consulted while applicable must be answered; gates sitting behind an
// off gate may stay unanswered.
std::vector<std::uint8_t> applicability(const AnswerSet& answers,
                                        const ChecklistSchema& schema) {
  // 0 = unresolved, 1 = applicable, 2 = gated off
  std::vector<std::uint8_t> state(schema.size(), 0);
  auto resolve = [&](auto&& self, std::size_t i) -> bool {
    if (state[i] == 0) {
      std::uint8_t verdict = 1;
      if (auto gate = schema.gate_of(i)) {
        if (!self(self, *gate)) {
          verdict = 2;
        } else {
          const Question& g = schema.questions()[*gate];
          auto it = answers.answers.find(g.id);
          if (it == answers.answers.end()) {
            throw MissingAnswer("sample '" + answers.sample_id + "': gate '" +
                                g.id + "' is applicable but unanswered");
          }
          verdict = std::get<bool>(it->second) ? 1 : 2;
        }
      }
      state[i] = verdict;
    }
    return state[i] == 1;
  };
  for (std::size_t i = 0; i < schema.size(); ++i) resolve(resolve, i);
  return state;
}

}  // namespace

FeatureVector extract_features(const AnswerSet& answers,
                               const ChecklistSchema& schema) {
  for (const auto& [id, value] : answers.answers) {
    if (!schema.find(id)) {
      throw SchemaMismatch("sample '" + answers.sample_id +
                           "': answer references unknown question '" + id + "'");
    }
  }

  const std::size_t n = schema.size();
  FeatureVector fv;
  fv.sample_id = answers.sample_id;
  fv.prompt_id = answers.prompt_id;
  fv.schema_hash = schema.content_hash();
  fv.values.assign(n, 0.0);
  fv.masked.assign(n, 0);

  const std::vector<std::uint8_t> state = applicability(answers, schema);
  for (std::size_t i = 0; i < n; ++i) {
    const Question& q = schema.questions()[i];
    if (q.is_gate() || state[i] == 2) {
      fv.masked[i] = 1;
      continue;
    }
    auto it = answers.answers.find(q.id);
    if (it == answers.answers.end()) {
      throw MissingAnswer("sample '" + answers.sample_id + "': question '" +
                          q.id + "' is applicable but unanswered");
    }
    if (q.kind == QuestionKind::binary) {
      fv.values[i] = std::get<bool>(it->second) ? 1.0 : 0.0;
    } else {
      double v = std::get<double>(it->second);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw OutOfRangeValue("sample '" + answers.sample_id + "': value " +
                              io::format_double(v) + " for '" + q.id +
                              "' is outside [0, 1]");
      }
      fv.values[i] = v;
    }
  }
  return fv;
}

std::vector<FeatureVector> extract_all(const std::vector<AnswerSet>& answers,
                                       const ChecklistSchema& schema) {
  std::vector<FeatureVector> out;
  out.reserve(answers.size());
  for (const AnswerSet& set : answers) out.push_back(extract_features(set, schema));
  return out;
}

DiffVector feature_diff(const FeatureVector& a, const FeatureVector& b) {
  if (a.schema_hash != b.schema_hash) {
    throw SchemaMismatch("feature vectors come from different schemas");
  }
  if (a.values.size() != b.values.size()) {
    throw DimensionMismatch("feature vectors have different lengths (" +
                            std::to_string(a.values.size()) + " vs " +
                            std::to_string(b.values.size()) + ")");
  }
  DiffVector d;
  d.schema_hash = a.schema_hash;
  const std::size_t n = a.values.size();
  d.values.assign(n, 0.0);
  d.masked.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a.masked[i] || b.masked[i]) {
      d.masked[i] = 1;
    } else {
      d.values[i] = a.values[i] - b.values[i];
    }
  }
  return d;
}

std::string serialize_features(const std::vector<FeatureVector>& features) {
  std::string out;
  for (const FeatureVector& fv : features) {
    ordered_json doc;
    doc["sample_id"] = fv.sample_id;
    if (fv.prompt_id) doc["prompt_id"] = *fv.prompt_id;
    doc["schema_hash"] = fv.schema_hash;
    doc["values"] = fv.values;
    doc["masked"] = std::vector<int>(fv.masked.begin(), fv.masked.end());
    out += doc.dump();
    out += '\n';
  }
  return out;
}

std::vector<FeatureVector> load_features(const std::string& text,
                                         const ChecklistSchema& schema) {
  std::vector<FeatureVector> out;
  const std::vector<std::string> lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t line_no = i + 1;
    json doc;
    try {
      doc = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    FeatureVector fv;
    try {
      fv.sample_id = doc.at("sample_id").get<std::string>();
      if (doc.contains("prompt_id") && !doc["prompt_id"].is_null()) {
        fv.prompt_id = doc["prompt_id"].get<std::string>();
      }
      fv.schema_hash = doc.at("schema_hash").get<std::string>();
      fv.values = doc.at("values").get<std::vector<double>>();
      for (int m : doc.at("masked").get<std::vector<int>>()) {
        fv.masked.push_back(std::uint8_t(m != 0));
      }
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (fv.schema_hash != schema.content_hash()) {
      throw SchemaMismatch("line " + std::to_string(line_no) +
                           ": features were extracted against a different schema");
    }
    if (fv.values.size() != schema.size() || fv.masked.size() != schema.size()) {
      throw DimensionMismatch("line " + std::to_string(line_no) +
                              ": expected " + std::to_string(schema.size()) +
                              " entries, got " + std::to_string(fv.values.size()));
    }
    out.push_back(std::move(fv));
  }
  return out;
}

ConsistencyReport consistency(const std::vector<AnswerSet>& answers,
                              const ChecklistSchema& schema) {
  ConsistencyReport report;
  for (const DimensionDecl& d : schema.dimensions()) {
    report.by_dimension.emplace(d.name, GroupRate{});
    for (const std::string& s : d.sub_dimensions) {
      report.by_sub_dimension.emplace(s, GroupRate{});
    }
  }

  for (const AnswerSet& set : answers) {
    const std::vector<std::uint8_t> state = applicability(set, schema);
    for (const std::string& sub : schema.sub_dimension_order()) {
      // Applicable ranked binary questions, weakest first.
      std::vector<bool> rungs;
      std::string dimension;
      for (std::size_t idx : schema.ladder(sub)) {
        const Question& q = schema.questions()[idx];
        if (q.kind != QuestionKind::binary || state[idx] == 2) continue;
        auto it = set.answers.find(q.id);
        if (it == set.answers.end()) {
          throw MissingAnswer("sample '" + set.sample_id + "': question '" +
                              q.id + "' is applicable but unanswered");
        }
        rungs.push_back(std::get<bool>(it->second));
        dimension = q.dimension;
      }
      if (rungs.size() < 2) continue;

      // Consistent iff the yes answers form a prefix: once a rung fails,
      // every stricter rung must fail too.
      bool failed = false;
      bool consistent = true;
      for (bool yes : rungs) {
        if (yes && failed) {
          consistent = false;
          break;
        }
        if (!yes) failed = true;
      }

      GroupRate& sub_rate = report.by_sub_dimension[sub];
      GroupRate& dim_rate = report.by_dimension[dimension];
      ++sub_rate.total;
      ++dim_rate.total;
      ++report.overall.total;
      if (consistent) {
        ++sub_rate.consistent;
        ++dim_rate.consistent;
        ++report.overall.consistent;
      }
    }
  }
  return report;
}

std::string serialize_consistency(const ConsistencyReport& report) {
  auto rate_json = [](const GroupRate& r) {
    ordered_json doc;
    doc["consistent"] = r.consistent;
    doc["total"] = r.total;
    if (auto rate = r.rate()) {
      doc["rate"] = *rate;
    } else {
      doc["rate"] = nullptr;
    }
    return doc;
  };
  ordered_json doc;
  doc["overall"] = rate_json(report.overall);
  ordered_json dims = ordered_json::object();
  for (const auto& [name, r] : report.by_dimension) dims[name] = rate_json(r);
  doc["by_dimension"] = std::move(dims);
  ordered_json subs = ordered_json::object();
  for (const auto& [name, r] : report.by_sub_dimension) subs[name] = rate_json(r);
  doc["by_sub_dimension"] = std::move(subs);
  return doc.dump(2) + "\n";
}

}  // namespace prefcheck
