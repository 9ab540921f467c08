#include "prefcheck/scoring.hpp"

#include <json.hpp>

#include "prefcheck/errors.hpp"
#include "prefcheck/io.hpp"

namespace prefcheck {

using nlohmann::json;
using nlohmann::ordered_json;

RewardReport score(const FeatureVector& features, const WeightVector& weights,
                   const ChecklistSchema& schema) {
  if (features.schema_hash != schema.content_hash()) {
    throw SchemaMismatch("sample '" + features.sample_id +
                         "': features come from a different schema");
  }
  if (weights.schema_hash != schema.content_hash()) {
    throw SchemaMismatch("weights come from a different schema");
  }
  if (features.values.size() != schema.size() ||
      weights.weights.size() != schema.size()) {
    throw DimensionMismatch("feature or weight length does not match schema");
  }

  RewardReport report;
  report.sample_id = features.sample_id;
  report.prompt_id = features.prompt_id;
  report.schema_hash = schema.content_hash();
  report.weights_fingerprint = weights_fingerprint(weights);
  for (const DimensionDecl& d : schema.dimensions()) {
    report.by_dimension.emplace(d.name, 0.0);
    for (const std::string& s : d.sub_dimensions) {
      report.by_sub_dimension.emplace(s, 0.0);
    }
  }

  for (std::size_t i = 0; i < schema.size(); ++i) {
    const Question& q = schema.questions()[i];
    double contribution = 0.0;
    if (features.masked[i]) {
      report.masked_questions.push_back(q.id);
    } else {
      contribution = weights.weights[i] * features.values[i];
    }
    report.by_question.emplace(q.id, contribution);
    report.by_sub_dimension[q.sub_dimension] += contribution;
    report.by_dimension[q.dimension] += contribution;
    report.total += contribution;
  }
  return report;
}

std::vector<RewardReport> score_batch(const std::vector<FeatureVector>& features,
                                      const WeightVector& weights,
                                      const ChecklistSchema& schema) {
  std::vector<RewardReport> out;
  out.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    try {
      out.push_back(score(features[i], weights, schema));
    } catch (const SchemaMismatch& e) {
      throw SchemaMismatch("candidate " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::string serialize_reports(const std::vector<RewardReport>& reports) {
  std::string out;
  for (const RewardReport& r : reports) {
    ordered_json doc;
    doc["sample_id"] = r.sample_id;
    if (r.prompt_id) doc["prompt_id"] = *r.prompt_id;
    doc["total"] = r.total;
    doc["by_dimension"] = r.by_dimension;
    doc["by_sub_dimension"] = r.by_sub_dimension;
    doc["by_question"] = r.by_question;
    doc["masked_questions"] = r.masked_questions;
    doc["schema_hash"] = r.schema_hash;
    doc["weights_fingerprint"] = r.weights_fingerprint;
    out += doc.dump();
    out += '\n';
  }
  return out;
}

std::vector<RewardReport> load_reports(const std::string& text) {
  std::vector<RewardReport> out;
  const std::vector<std::string> lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    json doc;
    try {
      doc = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    RewardReport r;
    try {
      r.sample_id = doc.at("sample_id").get<std::string>();
      if (doc.contains("prompt_id") && !doc["prompt_id"].is_null()) {
        r.prompt_id = doc["prompt_id"].get<std::string>();
      }
      r.total = doc.at("total").get<double>();
      if (doc.contains("by_dimension")) {
        r.by_dimension = doc["by_dimension"].get<std::map<std::string, double>>();
      }
      if (doc.contains("by_sub_dimension")) {
        r.by_sub_dimension =
            doc["by_sub_dimension"].get<std::map<std::string, double>>();
      }
      if (doc.contains("by_question")) {
        r.by_question = doc["by_question"].get<std::map<std::string, double>>();
      }
      if (doc.contains("masked_questions")) {
        r.masked_questions =
            doc["masked_questions"].get<std::vector<std::string>>();
      }
      if (doc.contains("schema_hash")) {
        r.schema_hash = doc["schema_hash"].get<std::string>();
      }
      if (doc.contains("weights_fingerprint")) {
        r.weights_fingerprint = doc["weights_fingerprint"].get<std::string>();
      }
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string reports_to_csv(const std::vector<RewardReport>& reports,
                           const ChecklistSchema& schema) {
  std::string out = "sample_id,prompt_id,total";
  for (const DimensionDecl& d : schema.dimensions()) {
    out += ',';
    out += d.name;
  }
  out += '\n';
  for (const RewardReport& r : reports) {
    out += r.sample_id;
    out += ',';
    if (r.prompt_id) out += *r.prompt_id;
    out += ',';
    out += io::format_double(r.total);
    for (const DimensionDecl& d : schema.dimensions()) {
      out += ',';
      auto it = r.by_dimension.find(d.name);
      out += io::format_double(it == r.by_dimension.end() ? 0.0 : it->second);
    }
    out += '\n';
  }
  return out;
}

}  // namespace prefcheck
