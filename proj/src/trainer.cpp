#include "prefcheck/trainer.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prefcheck/digest.hpp"
#include "prefcheck/errors.hpp"
#include "prefcheck/io.hpp"
#include "prefcheck/rng.hpp"

namespace prefcheck {

using nlohmann::json;
using nlohmann::ordered_json;

double sigmoid(double margin) {
  // Both branches reuse the same exp() value its mirror input would
  // produce, and 1 - x is exact for x in [0.5, 1], so the pair of results
  // for +m and -m always sums to exactly 1.
  if (margin >= 0.0) {
    const double t = std::exp(-margin);
    return 1.0 / (1.0 + t);
  }
  const double t = std::exp(margin);
  return 1.0 - 1.0 / (1.0 + t);
}

namespace {

// log(1 + exp(z)) without overflow for large |z|.
double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double margin_of(const DiffVector& diff, const std::vector<double>& w) {
  double m = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) m += w[i] * diff.values[i];
  return m;
}

void check_pair(const DiffVector& diff, int y, std::size_t n_weights) {
  if (diff.values.size() != n_weights) {
    throw DimensionMismatch("pair has " + std::to_string(diff.values.size()) +
                            " entries, weights have " +
                            std::to_string(n_weights));
  }
  if (y != 0 && y != 1) {
    throw ValidationError("pair label y must be 0 or 1, got " +
                          std::to_string(y));
  }
}

}  // namespace

double logistic_loss(const DiffVector& diff, int y, const WeightVector& w) {
  check_pair(diff, y, w.weights.size());
  const double m = margin_of(diff, w.weights);
  return y == 1 ? softplus(-m) : softplus(m);
}

std::vector<double> loss_gradient(const DiffVector& diff, int y,
                                  const WeightVector& w) {
  check_pair(diff, y, w.weights.size());
  const double r = sigmoid(margin_of(diff, w.weights)) - double(y);
  std::vector<double> g(w.weights.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = r * diff.values[i];
  return g;
}

namespace {

std::string pairs_fingerprint(const std::vector<TrainingPair>& pairs,
                              const std::string& schema_hash) {
  std::string text = "pairs:" + schema_hash + "\n";
  for (const TrainingPair& p : pairs) {
    text += std::to_string(p.y);
    text += ';';
    for (std::size_t i = 0; i < p.diff.values.size(); ++i) {
      if (i) text += ',';
      text += io::format_double(p.diff.values[i]);
    }
    text += '|';
    for (std::uint8_t m : p.diff.masked) text += m ? '1' : '0';
    text += '\n';
  }
  return sha256_hex(text);
}

}  // namespace

WeightVector train_weights(const std::vector<TrainingPair>& pairs,
                           const ChecklistSchema& schema,
                           const TrainingConfig& config) {
  if (pairs.empty()) throw EmptyDataset("no training pairs");
  const std::size_t n = schema.size();
  for (const TrainingPair& p : pairs) {
    if (p.diff.schema_hash != schema.content_hash()) {
      throw SchemaMismatch("training pair built against a different schema");
    }
    check_pair(p.diff, p.y, n);
  }
  if (config.learning_rate <= 0.0 || !std::isfinite(config.learning_rate)) {
    throw ValidationError("learning_rate must be positive and finite");
  }
  if (config.convergence_epsilon < 0.0 ||
      !std::isfinite(config.convergence_epsilon)) {
    throw ValidationError("convergence_epsilon must be nonnegative and finite");
  }
  if (config.init == TrainingConfig::Init::uniform &&
      !(config.init_low <= config.init_high)) {
    throw ValidationError("uniform init needs init_low <= init_high");
  }

  // updatable[i] == 0 holds the coordinate at its pinned value: gates stay
  // at exactly 0, user pins at their given value.
  std::vector<std::uint8_t> updatable(n, 1);
  std::vector<double> w(n, 0.0);
  if (config.init == TrainingConfig::Init::uniform) {
    Rng init_rng(derive_seed(config.seed, "init"));
    for (double& wi : w) wi = init_rng.real(config.init_low, config.init_high);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (schema.questions()[i].is_gate()) {
      updatable[i] = 0;
      w[i] = 0.0;
    }
  }
  for (const auto& [id, value] : config.pins) {
    const std::size_t idx = schema.question_index(id);
    if (!std::isfinite(value) || value < 0.0) {
      throw ValidationError("pin for '" + id + "' must be finite and >= 0");
    }
    if (schema.questions()[idx].is_gate() && value != 0.0) {
      throw ValidationError("cannot pin gate '" + id + "' away from 0");
    }
    updatable[idx] = 0;
    w[idx] = value;
  }
  // The masking step also applies to the starting point, so the
  // nonnegativity invariant holds even when the iteration cap is 0.
  for (std::size_t i = 0; i < n; ++i) {
    if (updatable[i] && w[i] <= 0.0) w[i] = 0.0;
  }

  Rng shuffle_rng(derive_seed(config.seed, "train"));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);

  const double lr = config.learning_rate;
  std::vector<double> w_old(n);
  std::vector<double> grad(n);
  bool converged = false;
  std::size_t epoch = 0;

  while (epoch < config.max_outer_iterations) {
    ++epoch;
    w_old = w;
    if (config.shuffle_per_epoch) shuffle_rng.shuffle(order);

    if (config.batch == TrainingConfig::Batch::per_pair) {
      for (std::size_t idx : order) {
        const TrainingPair& p = pairs[idx];
        const double r = sigmoid(margin_of(p.diff, w)) - double(p.y);
        if (r == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = p.diff.values[i];
          if (d == 0.0 || !updatable[i]) continue;
          w[i] -= lr * r * d;
        }
      }
    } else {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t idx : order) {
        const TrainingPair& p = pairs[idx];
        const double r = sigmoid(margin_of(p.diff, w)) - double(p.y);
        for (std::size_t i = 0; i < n; ++i) grad[i] += r * p.diff.values[i];
      }
      const double scale = lr / double(pairs.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (updatable[i]) w[i] -= scale * grad[i];
      }
    }

    // Divergence check before masking: clamping would hide a slide to
    // -inf, so inspect the raw update first.
    for (double wi : w) {
      if (!std::isfinite(wi)) {
        throw NonFiniteLoss("weights left the finite range during epoch " +
                            std::to_string(epoch));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (updatable[i] && w[i] <= 0.0) w[i] = 0.0;
    }

    double movement_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = w[i] - w_old[i];
      movement_sq += d * d;
    }
    if (std::sqrt(movement_sq) <= config.convergence_epsilon) {
      converged = true;
      break;
    }
  }

  WeightVector out;
  out.schema_hash = schema.content_hash();
  out.weights = std::move(w);
  out.converged = converged;
  out.outer_iterations = epoch;
  out.trained_on = pairs_fingerprint(pairs, schema.content_hash());
  out.config = config;

  double total = 0.0;
  for (const TrainingPair& p : pairs) total += logistic_loss(p.diff, p.y, out);
  const double mean_loss = total / double(pairs.size());
  if (!std::isfinite(mean_loss)) {
    throw NonFiniteLoss("final loss is not finite");
  }
  out.final_loss = mean_loss;
  return out;
}

PairBuildResult make_training_pairs(const std::vector<PreferenceRecord>& records,
                                    const std::vector<FeatureVector>& features,
                                    const ChecklistSchema& schema) {
  std::map<std::string, const FeatureVector*> by_id;
  for (const FeatureVector& fv : features) by_id[fv.sample_id] = &fv;

  PairBuildResult result;
  for (const PreferenceRecord& rec : records) {
    const Label label = derive_label(rec);
    if (label == Label::Tie) {
      ++result.ties_dropped;
      continue;
    }
    auto a = by_id.find(rec.sample_a);
    auto b = by_id.find(rec.sample_b);
    if (a == by_id.end() || b == by_id.end()) {
      throw ValidationError("pair '" + rec.pair_id + "': sample '" +
                            (a == by_id.end() ? rec.sample_a : rec.sample_b) +
                            "' has no feature vector");
    }
    TrainingPair pair;
    pair.diff = feature_diff(*a->second, *b->second);
    if (pair.diff.schema_hash != schema.content_hash()) {
      throw SchemaMismatch("pair '" + rec.pair_id +
                           "' was extracted against a different schema");
    }
    pair.y = label == Label::A ? 1 : 0;
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

HoldoutSplit split_holdout(const std::vector<TrainingPair>& pairs,
                           double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw OutOfRangeValue("holdout fraction must be in [0, 1)");
  }
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "holdout"));
  rng.shuffle(order);
  const std::size_t n_held = std::size_t(std::llround(fraction * double(pairs.size())));

  HoldoutSplit split;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < n_held ? split.held : split.train).push_back(pairs[order[k]]);
  }
  return split;
}

std::string weights_fingerprint(const WeightVector& w) {
  std::string text = "weights:" + w.schema_hash + ":";
  for (std::size_t i = 0; i < w.weights.size(); ++i) {
    if (i) text += ',';
    text += io::format_double(w.weights[i]);
  }
  return sha256_hex(text);
}

namespace {

ordered_json config_to_json(const TrainingConfig& c) {
  ordered_json doc;
  doc["learning_rate"] = c.learning_rate;
  doc["convergence_epsilon"] = c.convergence_epsilon;
  doc["max_outer_iterations"] = c.max_outer_iterations;
  if (c.init == TrainingConfig::Init::zeros) {
    doc["init"] = "zeros";
  } else {
    doc["init"] = ordered_json{{"uniform", {c.init_low, c.init_high}}};
  }
  doc["seed"] = c.seed;
  doc["shuffle_per_epoch"] = c.shuffle_per_epoch;
  doc["batch"] = c.batch == TrainingConfig::Batch::per_pair ? "per_pair" : "full";
  if (!c.pins.empty()) {
    ordered_json pins = ordered_json::object();
    for (const auto& [id, v] : c.pins) pins[id] = v;
    doc["pins"] = std::move(pins);
  }
  return doc;
}

TrainingConfig config_from_json(const json& doc) {
  TrainingConfig c;
  if (doc.contains("learning_rate")) c.learning_rate = doc["learning_rate"].get<double>();
  if (doc.contains("convergence_epsilon")) {
    c.convergence_epsilon = doc["convergence_epsilon"].get<double>();
  }
  if (doc.contains("max_outer_iterations")) {
    c.max_outer_iterations = doc["max_outer_iterations"].get<std::size_t>();
  }
  if (doc.contains("init")) {
    const json& init = doc["init"];
    if (init.is_string() && init.get<std::string>() == "zeros") {
      c.init = TrainingConfig::Init::zeros;
    } else if (init.is_object() && init.contains("uniform")) {
      c.init = TrainingConfig::Init::uniform;
      c.init_low = init["uniform"].at(0).get<double>();
      c.init_high = init["uniform"].at(1).get<double>();
    } else {
      throw ParseError("init must be \"zeros\" or {\"uniform\": [low, high]}");
    }
  }
  if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("shuffle_per_epoch")) {
    c.shuffle_per_epoch = doc["shuffle_per_epoch"].get<bool>();
  }
  if (doc.contains("batch")) {
    const std::string b = doc["batch"].get<std::string>();
    if (b == "per_pair") c.batch = TrainingConfig::Batch::per_pair;
    else if (b == "full") c.batch = TrainingConfig::Batch::full;
    else throw ParseError("batch must be 'per_pair' or 'full'");
  }
  if (doc.contains("pins")) {
    for (const auto& [id, v] : doc["pins"].items()) {
      c.pins[id] = v.get<double>();
    }
  }
  return c;
}

}  // namespace

TrainingConfig training_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("training config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError("training config: document must be an object");
  }
  try {
    return config_from_json(doc);
  } catch (const json::exception& e) {
    throw ParseError(std::string("training config: ") + e.what());
  }
}

std::string serialize_weights(const WeightVector& w,
                              const ChecklistSchema& schema) {
  if (w.weights.size() != schema.size()) {
    throw DimensionMismatch("weight vector has " +
                            std::to_string(w.weights.size()) +
                            " entries, schema has " +
                            std::to_string(schema.size()));
  }
  ordered_json header;
  header["schema_hash"] = w.schema_hash;
  header["converged"] = w.converged;
  header["outer_iterations"] = w.outer_iterations;
  if (w.final_loss) header["final_loss"] = *w.final_loss;
  if (!w.trained_on.empty()) header["trained_on"] = w.trained_on;
  if (w.config) header["config"] = config_to_json(*w.config);

  std::string out = header.dump();
  out += '\n';
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const Question& q = schema.questions()[i];
    ordered_json line;
    line["id"] = q.id;
    line["weight"] = w.weights[i];
    if (q.is_gate()) line["gate"] = true;
    out += line.dump();
    out += '\n';
  }
  return out;
}

WeightVector load_weights(const std::string& text,
                          const ChecklistSchema& schema) {
  const std::vector<std::string> lines = io::split_lines(text);
  if (lines.empty() || lines[0].empty()) {
    throw ParseError("weight file is empty");
  }
  json header;
  try {
    header = json::parse(lines[0]);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("line 1: ") + e.what());
  }
  if (!header.is_object() || !header.contains("schema_hash")) {
    throw ParseError("line 1: expected a header object with 'schema_hash'");
  }

  WeightVector w;
  w.schema_hash = header["schema_hash"].get<std::string>();
  if (w.schema_hash != schema.content_hash()) {
    throw SchemaMismatch("weights were trained against a different schema");
  }
  if (header.contains("converged")) w.converged = header["converged"].get<bool>();
  if (header.contains("outer_iterations")) {
    w.outer_iterations = header["outer_iterations"].get<std::size_t>();
  }
  if (header.contains("final_loss")) w.final_loss = header["final_loss"].get<double>();
  if (header.contains("trained_on")) w.trained_on = header["trained_on"].get<std::string>();
  if (header.contains("config")) w.config = config_from_json(header["config"]);

  w.weights.assign(schema.size(), 0.0);
  std::vector<std::uint8_t> seen(schema.size(), 0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    json doc;
    try {
      doc = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("id") || !doc.contains("weight") ||
        !doc["weight"].is_number()) {
      throw ParseError("line " + std::to_string(i + 1) +
                       ": expected {\"id\", \"weight\"}");
    }
    const std::string id = doc["id"].get<std::string>();
    std::size_t idx;
    try {
      idx = schema.question_index(id);
    } catch (const UnknownQuestion&) {
      throw UnknownQuestion("line " + std::to_string(i + 1) +
                            ": no question with id '" + id + "'");
    }
    if (seen[idx]) {
      throw ValidationError("line " + std::to_string(i + 1) +
                            ": duplicate weight for '" + id + "'");
    }
    seen[idx] = 1;
    const double value = doc["weight"].get<double>();
    if (!std::isfinite(value) || value < 0.0) {
      throw ValidationError("line " + std::to_string(i + 1) + ": weight for '" +
                            id + "' must be finite and >= 0");
    }
    if (schema.questions()[idx].is_gate() && value != 0.0) {
      throw ValidationError("line " + std::to_string(i + 1) + ": gate '" + id +
                            "' must have weight 0");
    }
    w.weights[idx] = value;
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!seen[i]) {
      throw ValidationError("weight file is missing question '" +
                            schema.questions()[i].id + "'");
    }
  }
  return w;
}

}  // namespace prefcheck
