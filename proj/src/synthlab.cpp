#include "prefcheck/synthlab.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "prefcheck/digest.hpp"
#include "prefcheck/errors.hpp"
#include "prefcheck/features.hpp"
#include "prefcheck/rng.hpp"

namespace prefcheck {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string zero_padded(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%06zu", prefix, i);
  return buf;
}

void check_world_config(const WorldConfig& c) {
  if (c.dims == 0 || c.subdims_per_dim == 0 || c.questions_per_subdim == 0) {
    throw ValidationError("world needs at least one dimension, sub-dimension, "
                          "and question per sub-dimension");
  }
  if (c.candidates_per_prompt == 0) {
    throw ValidationError("candidates_per_prompt must be >= 1");
  }
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(c.gate_fraction) || !in_unit(c.weight_sparsity) ||
      !in_unit(c.consistency_violation_rate) || !in_unit(c.absent_probability)) {
    throw OutOfRangeValue("world rates must be in [0, 1]");
  }
  if (!(c.annotator_noise >= 0.0 && c.annotator_noise < 0.5)) {
    throw OutOfRangeValue("annotator_noise must be in [0, 0.5)");
  }
}

}  // namespace

SyntheticWorld gen_world(const WorldConfig& config) {
  check_world_config(config);
  Rng rng(derive_seed(config.seed, "world"));

  std::vector<DimensionDecl> dimensions;
  std::vector<Question> questions;
  std::vector<double> weights;

  for (std::size_t d = 0; d < config.dims; ++d) {
    DimensionDecl decl;
    decl.name = "d" + std::to_string(d);
    for (std::size_t s = 0; s < config.subdims_per_dim; ++s) {
      const std::string sub = decl.name + ".s" + std::to_string(s);
      decl.sub_dimensions.push_back(sub);

      // A gate only makes sense when a ladder remains behind it.
      const bool gated =
          config.questions_per_subdim >= 2 && rng.chance(config.gate_fraction);
      std::string gate_id;
      if (gated) {
        gate_id = sub + ".present";
        Question gate;
        gate.id = gate_id;
        gate.text = "Is the " + sub + " attribute present?";
        gate.dimension = decl.name;
        gate.sub_dimension = sub;
        questions.push_back(std::move(gate));
        weights.push_back(0.0);
      }
      const std::size_t ladder_size =
          config.questions_per_subdim - (gated ? 1 : 0);
      for (std::size_t r = 0; r < ladder_size; ++r) {
        Question q;
        q.id = sub + ".q" + std::to_string(r);
        q.text = "Does the sample meet " + sub + " standard " +
                 std::to_string(r) + "?";
        q.dimension = decl.name;
        q.sub_dimension = sub;
        q.rank = int(r);
        if (gated) q.gate = gate_id;
        questions.push_back(std::move(q));
        weights.push_back(rng.chance(config.weight_sparsity)
                              ? 0.0
                              : rng.real(0.05, 1.0));
      }
    }
    dimensions.push_back(std::move(decl));
  }

  if (config.continuous_alignment) {
    dimensions.push_back({"alignment", {"alignment.match"}});
    Question q;
    q.id = "alignment.match";
    q.text = "Does the sample depict \"[[prompt]]\"?";
    q.dimension = "alignment";
    q.sub_dimension = "alignment.match";
    q.kind = QuestionKind::continuous;
    q.rank = 0;
    questions.push_back(std::move(q));
    // The alignment signal outweighs any single checklist item.
    weights.push_back(rng.real(1.5, 2.5));
  }

  SyntheticWorld world;
  world.schema = ChecklistSchema("synthetic-world", std::move(dimensions),
                                 std::move(questions));
  world.true_weights = std::move(weights);
  world.config = config;
  return world;
}

SyntheticWorld gen_world(std::size_t dims, std::size_t subdims_per_dim,
                         std::size_t questions_per_subdim, std::uint64_t seed) {
  WorldConfig config;
  config.dims = dims;
  config.subdims_per_dim = subdims_per_dim;
  config.questions_per_subdim = questions_per_subdim;
  config.seed = seed;
  return gen_world(config);
}

namespace {

struct SubLayout {
  std::string sub;
  const Question* gate = nullptr;
  std::vector<const Question*> binary_ladder;  // rank ascending
  std::vector<const Question*> continuous;
};

std::vector<SubLayout> layout_of(const ChecklistSchema& schema) {
  std::vector<SubLayout> out;
  for (const std::string& sub : schema.sub_dimension_order()) {
    SubLayout layout;
    layout.sub = sub;
    for (const Question& q : schema.questions()) {
      if (q.sub_dimension == sub && q.is_gate()) layout.gate = &q;
    }
    for (std::size_t idx : schema.ladder(sub)) {
      const Question& q = schema.questions()[idx];
      (q.kind == QuestionKind::binary ? layout.binary_ladder
                                      : layout.continuous)
          .push_back(&q);
    }
    out.push_back(std::move(layout));
  }
  return out;
}

}  // namespace

std::vector<AnswerSet> gen_samples(const SyntheticWorld& world, std::size_t n) {
  const std::vector<SubLayout> layout = layout_of(world.schema);
  const WorldConfig& c = world.config;

  std::vector<AnswerSet> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(c.seed, "sample:" + std::to_string(i)));
    AnswerSet set;
    set.sample_id = zero_padded("s", i);
    set.prompt_id = zero_padded("p", i / c.candidates_per_prompt);

    for (const SubLayout& sub : layout) {
      if (sub.gate) {
        const bool present = !rng.chance(c.absent_probability);
        set.answers.emplace(sub.gate->id, present);
        if (!present) continue;  // gated-off ladder stays unanswered
      }
      if (!sub.binary_ladder.empty()) {
        const std::size_t r_count = sub.binary_ladder.size();
        // Satisfied level: -1 fails even the weakest rung.
        const std::int64_t level = rng.between(-1, std::int64_t(r_count) - 1);
        for (std::size_t r = 0; r < r_count; ++r) {
          bool yes = std::int64_t(r) <= level;
          if (c.annotator_noise > 0.0 && rng.chance(c.annotator_noise)) {
            yes = !yes;
          }
          set.answers.emplace(sub.binary_ladder[r]->id, yes);
        }
      }
      for (const Question* q : sub.continuous) {
        set.answers.emplace(q->id, rng.real());
      }
    }
    samples.push_back(std::move(set));
  }

  if (c.consistency_violation_rate > 0.0) {
    // Exact-quota planting. Collect groups that can carry a violation,
    // count those noise already violated, and flip adjacent rungs in
    // randomly chosen clean groups until the quota is met.
    struct GroupRef {
      std::size_t sample;
      const SubLayout* sub;
    };
    std::vector<GroupRef> clean;
    std::size_t eligible = 0;
    std::size_t violated = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (const SubLayout& sub : layout) {
        if (sub.binary_ladder.size() < 2) continue;
        if (sub.gate &&
            !std::get<bool>(samples[i].answers.at(sub.gate->id))) {
          continue;
        }
        ++eligible;
        bool failed = false;
        bool monotone = true;
        for (const Question* q : sub.binary_ladder) {
          const bool yes = std::get<bool>(samples[i].answers.at(q->id));
          if (yes && failed) {
            monotone = false;
            break;
          }
          if (!yes) failed = true;
        }
        if (monotone) clean.push_back({i, &sub});
        else ++violated;
      }
    }
    const auto target = std::size_t(
        std::llround(c.consistency_violation_rate * double(eligible)));
    if (target > violated) {
      Rng rng(derive_seed(c.seed, "violations"));
      rng.shuffle(clean);
      const std::size_t to_plant = std::min(target - violated, clean.size());
      for (std::size_t k = 0; k < to_plant; ++k) {
        const GroupRef& g = clean[k];
        const std::size_t p =
            std::size_t(rng.below(g.sub->binary_ladder.size() - 1));
        samples[g.sample].answers[g.sub->binary_ladder[p]->id] = false;
        samples[g.sample].answers[g.sub->binary_ladder[p + 1]->id] = true;
      }
    }
  }
  return samples;
}

std::vector<PreferenceRecord> gen_preferences(const SyntheticWorld& world,
                                              const std::vector<AnswerSet>& samples,
                                              std::size_t n_pairs,
                                              double label_flip_rate) {
  if (samples.size() < 2) {
    throw InsufficientSamples("pair generation needs at least two samples, got " +
                              std::to_string(samples.size()));
  }
  if (!(label_flip_rate >= 0.0 && label_flip_rate <= 1.0)) {
    throw OutOfRangeValue("label_flip_rate must be in [0, 1]");
  }
  const std::vector<FeatureVector> features = extract_all(samples, world.schema);

  Rng rng(derive_seed(world.config.seed, "prefs"));
  std::vector<PreferenceRecord> out;
  out.reserve(n_pairs);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const std::size_t i = std::size_t(rng.below(samples.size()));
    std::size_t j = std::size_t(rng.below(samples.size() - 1));
    if (j >= i) ++j;

    const DiffVector diff = feature_diff(features[i], features[j]);
    double margin = 0.0;
    for (std::size_t q = 0; q < diff.values.size(); ++q) {
      margin += world.true_weights[q] * diff.values[q];
    }
    Label label = margin > 0.0   ? Label::A
                  : margin < 0.0 ? Label::B
                                 : Label::Tie;
    if (label != Label::Tie && label_flip_rate > 0.0 &&
        rng.chance(label_flip_rate)) {
      label = label == Label::A ? Label::B : Label::A;
    }

    PreferenceRecord rec;
    rec.pair_id = zero_padded("pair", k);
    rec.sample_a = samples[i].sample_id;
    rec.sample_b = samples[j].sample_id;
    rec.label = label;
    out.push_back(std::move(rec));
  }
  return out;
}

WeightVector true_weight_vector(const SyntheticWorld& world) {
  WeightVector w;
  w.schema_hash = world.schema.content_hash();
  w.weights = world.true_weights;
  w.converged = true;
  w.trained_on = "synthetic-ground-truth";
  return w;
}

std::string serialize_world(const SyntheticWorld& world) {
  ordered_json doc;
  ordered_json config;
  const WorldConfig& c = world.config;
  config["dims"] = c.dims;
  config["subdims_per_dim"] = c.subdims_per_dim;
  config["questions_per_subdim"] = c.questions_per_subdim;
  config["seed"] = c.seed;
  config["gate_fraction"] = c.gate_fraction;
  config["annotator_noise"] = c.annotator_noise;
  config["consistency_violation_rate"] = c.consistency_violation_rate;
  config["weight_sparsity"] = c.weight_sparsity;
  config["continuous_alignment"] = c.continuous_alignment;
  config["candidates_per_prompt"] = c.candidates_per_prompt;
  config["absent_probability"] = c.absent_probability;
  doc["config"] = std::move(config);
  doc["true_weights"] = world.true_weights;
  doc["schema"] = json::parse(world.schema.serialize());
  return doc.dump(2) + "\n";
}

SyntheticWorld load_world(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("world: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("config") || !doc.contains("schema") ||
      !doc.contains("true_weights")) {
    throw ParseError("world: expected 'config', 'schema', and 'true_weights'");
  }

  SyntheticWorld world;
  const json& c = doc["config"];
  try {
    world.config.dims = c.at("dims").get<std::size_t>();
    world.config.subdims_per_dim = c.at("subdims_per_dim").get<std::size_t>();
    world.config.questions_per_subdim =
        c.at("questions_per_subdim").get<std::size_t>();
    world.config.seed = c.at("seed").get<std::uint64_t>();
    world.config.gate_fraction = c.at("gate_fraction").get<double>();
    world.config.annotator_noise = c.at("annotator_noise").get<double>();
    world.config.consistency_violation_rate =
        c.at("consistency_violation_rate").get<double>();
    world.config.weight_sparsity = c.at("weight_sparsity").get<double>();
    world.config.continuous_alignment =
        c.at("continuous_alignment").get<bool>();
    world.config.candidates_per_prompt =
        c.at("candidates_per_prompt").get<std::size_t>();
    world.config.absent_probability = c.at("absent_probability").get<double>();
    world.true_weights = doc["true_weights"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("world: ") + e.what());
  }
  check_world_config(world.config);
  world.schema = ChecklistSchema::parse(doc["schema"].dump());
  if (world.true_weights.size() != world.schema.size()) {
    throw DimensionMismatch("world carries " +
                            std::to_string(world.true_weights.size()) +
                            " true weights for " +
                            std::to_string(world.schema.size()) + " questions");
  }
  for (std::size_t i = 0; i < world.true_weights.size(); ++i) {
    const double w = world.true_weights[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("true weight for '" +
                            world.schema.questions()[i].id +
                            "' must be finite and >= 0");
    }
  }
  return world;
}

}  // namespace prefcheck
