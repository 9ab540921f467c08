#include "prefcheck/selection.hpp"

#include <json.hpp>

#include <algorithm>

#include "prefcheck/errors.hpp"
#include "prefcheck/io.hpp"

namespace prefcheck {

using nlohmann::json;
using nlohmann::ordered_json;

Granularity granularity_from_string(const std::string& text) {
  if (text == "dimension") return Granularity::dimension;
  if (text == "sub_dimension") return Granularity::sub_dimension;
  if (text == "question") return Granularity::question;
  throw ParseError("granularity must be 'dimension', 'sub_dimension', or "
                   "'question', got '" + text + "'");
}

std::string to_string(Granularity g) {
  switch (g) {
    case Granularity::dimension: return "dimension";
    case Granularity::sub_dimension: return "sub_dimension";
    case Granularity::question: return "question";
  }
  throw ValidationError("unreachable granularity");
}

SelectionMode selection_mode_from_string(const std::string& text) {
  if (text == "dpo") return SelectionMode::dpo;
  if (text == "mpo") return SelectionMode::mpo;
  throw ParseError("mode must be 'dpo' or 'mpo', got '" + text + "'");
}

std::string to_string(SelectionMode m) {
  return m == SelectionMode::dpo ? "dpo" : "mpo";
}

namespace {

const std::map<std::string, double>& breakdown(const RewardReport& r,
                                               Granularity g) {
  switch (g) {
    case Granularity::dimension: return r.by_dimension;
    case Granularity::sub_dimension: return r.by_sub_dimension;
    case Granularity::question: return r.by_question;
  }
  throw ValidationError("unreachable granularity");
}

}  // namespace

bool dominates(const RewardReport& a, const RewardReport& b, Granularity g) {
  if (a.weights_fingerprint != b.weights_fingerprint ||
      a.schema_hash != b.schema_hash) {
    throw SchemaMismatch("reports '" + a.sample_id + "' and '" + b.sample_id +
                         "' were scored against different weights or schemas");
  }
  const auto& ba = breakdown(a, g);
  const auto& bb = breakdown(b, g);
  // A loaded report may carry only coarser breakdowns; an absent map shows
  // up empty while by_dimension never does for a nonempty schema.
  if ((ba.empty() || bb.empty()) && !(a.by_dimension.empty() && b.by_dimension.empty())) {
    throw MissingBreakdown("report lacks the '" + to_string(g) +
                           "' breakdown needed for dominance");
  }
  if (ba.size() != bb.size()) {
    throw DimensionMismatch("reports decompose into different unit sets");
  }
  auto ita = ba.begin();
  auto itb = bb.begin();
  for (; ita != ba.end(); ++ita, ++itb) {
    if (ita->first != itb->first) {
      throw DimensionMismatch("reports decompose into different unit sets");
    }
    if (ita->second < itb->second) return false;
  }
  return a.total > b.total;
}

std::vector<SelectedPair> select_pairs(const CandidateGroup& group,
                                       const SelectionConfig& config) {
  if (config.threshold < 0.0) {
    throw OutOfRangeValue("selection threshold must be >= 0");
  }
  std::vector<SelectedPair> out;
  const auto& cs = group.candidates;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = 0; j < cs.size(); ++j) {
      if (i == j) continue;
      const double gap = cs[i].total - cs[j].total;
      if (!(gap > 0.0) || gap < config.threshold) continue;
      if (config.mode == SelectionMode::mpo &&
          !dominates(cs[i], cs[j], config.granularity)) {
        continue;
      }
      out.push_back({group.prompt_id, cs[i].sample_id, cs[j].sample_id, gap});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SelectedPair& a, const SelectedPair& b) {
              if (a.total_gap != b.total_gap) return a.total_gap > b.total_gap;
              if (a.winner_id != b.winner_id) return a.winner_id < b.winner_id;
              return a.loser_id < b.loser_id;
            });
  if (config.max_pairs_per_prompt && out.size() > *config.max_pairs_per_prompt) {
    out.resize(*config.max_pairs_per_prompt);
  }
  return out;
}

std::vector<SelectedPair> select_pairs(const std::vector<CandidateGroup>& groups,
                                       const SelectionConfig& config) {
  std::vector<SelectedPair> out;
  for (const CandidateGroup& g : groups) {
    std::vector<SelectedPair> pairs = select_pairs(g, config);
    out.insert(out.end(), pairs.begin(), pairs.end());
  }
  return out;
}

SelectionStats selection_stats(const std::vector<SelectedPair>& pairs,
                               const std::vector<CandidateGroup>& groups,
                               const SelectionConfig& config) {
  std::map<std::string, std::map<std::string, const RewardReport*>> by_prompt;
  for (const CandidateGroup& g : groups) {
    for (const RewardReport& r : g.candidates) {
      by_prompt[g.prompt_id][r.sample_id] = &r;
    }
  }

  SelectionStats stats;
  stats.pairs_emitted = pairs.size();
  for (const SelectedPair& p : pairs) {
    auto prompt_it = by_prompt.find(p.prompt_id);
    if (prompt_it == by_prompt.end()) {
      throw ValidationError("pair references unknown prompt '" + p.prompt_id + "'");
    }
    auto w = prompt_it->second.find(p.winner_id);
    auto l = prompt_it->second.find(p.loser_id);
    if (w == prompt_it->second.end() || l == prompt_it->second.end()) {
      throw ValidationError("pair under prompt '" + p.prompt_id +
                            "' references a sample outside its group");
    }
    if (dominates(*w->second, *l->second, config.granularity)) {
      ++stats.dominated_count;
    } else {
      ++stats.not_dominated_count;
    }
    ++stats.per_prompt[p.prompt_id];
  }
  return stats;
}

std::vector<CandidateGroup> group_by_prompt(const std::vector<RewardReport>& reports) {
  std::vector<CandidateGroup> groups;
  std::map<std::string, std::size_t> index;
  for (const RewardReport& r : reports) {
    const std::string key = r.prompt_id ? *r.prompt_id : r.sample_id;
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back({key, {}});
    groups[it->second].candidates.push_back(r);
  }
  return groups;
}

std::string serialize_pairs(const std::vector<SelectedPair>& pairs) {
  std::string out;
  for (const SelectedPair& p : pairs) {
    ordered_json doc;
    doc["prompt_id"] = p.prompt_id;
    doc["winner_id"] = p.winner_id;
    doc["loser_id"] = p.loser_id;
    doc["total_gap"] = p.total_gap;
    out += doc.dump();
    out += '\n';
  }
  return out;
}

std::vector<SelectedPair> load_pairs(const std::string& text) {
  std::vector<SelectedPair> out;
  const std::vector<std::string> lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    json doc;
    try {
      doc = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    SelectedPair p;
    try {
      p.prompt_id = doc.at("prompt_id").get<std::string>();
      p.winner_id = doc.at("winner_id").get<std::string>();
      p.loser_id = doc.at("loser_id").get<std::string>();
      p.total_gap = doc.at("total_gap").get<double>();
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string serialize_stats(const SelectionStats& stats,
                            const SelectionConfig& config) {
  ordered_json doc;
  doc["mode"] = to_string(config.mode);
  doc["granularity"] = to_string(config.granularity);
  doc["threshold"] = config.threshold;
  if (config.max_pairs_per_prompt) {
    doc["max_pairs_per_prompt"] = *config.max_pairs_per_prompt;
  }
  doc["pairs_emitted"] = stats.pairs_emitted;
  doc["dominated_count"] = stats.dominated_count;
  doc["not_dominated_count"] = stats.not_dominated_count;
  ordered_json per_prompt = ordered_json::object();
  for (const auto& [prompt, count] : stats.per_prompt) per_prompt[prompt] = count;
  doc["per_prompt"] = std::move(per_prompt);
  return doc.dump(2) + "\n";
}

}  // namespace prefcheck
