// SPDX-License-Identifier: Apache-2.0
#include "acmv/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "acmv/errors.hpp"

namespace acmv {
namespace {

using nlohmann::json;

const json& section(const json& root, const char* name, std::initializer_list<const char*> keys) {
  static const json empty = json::object();
  if (!root.contains(name)) return empty;
  const json& s = root.at(name);
  if (!s.is_object()) throw ConfigError(std::string("config section '") + name + "' must be an object");
  for (const auto& [key, value] : s.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) {
      std::string valid;
      for (const char* k : keys) valid += std::string(valid.empty() ? "" : ", ") + k;
      throw ConfigError("unknown key '" + std::string(name) + "." + key + "' (valid: " + valid + ")");
    }
  }
  return s;
}

template <typename T>
void read(const json& obj, const char* section_name, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + section_name + "." + key +
                      "' has the wrong type");
  }
}

json generator_json(const GeneratorConfig& g) {
  return json{{"rows", g.rows},
              {"cols", g.cols},
              {"cell_size_m", g.cell_size_m},
              {"poi_categories", g.poi_categories},
              {"transport_lines", g.transport_lines},
              {"days", g.days},
              {"hubs", g.hubs},
              {"base_amplitude", g.base_amplitude},
              {"hub_amplitude", g.hub_amplitude},
              {"rush_amplitude", g.rush_amplitude},
              {"noise", g.noise},
              {"rain_damping", g.rain_damping},
              {"cloudy_damping", g.cloudy_damping},
              {"holiday_poi_factor", g.holiday_poi_factor},
              {"holiday_period", g.holiday_period},
              {"weather_persistence", g.weather_persistence},
              {"station_spacing", g.station_spacing}};
}

GeneratorConfig generator_from(const json& s) {
  GeneratorConfig g;
  const char* n = "generator";
  read(s, n, "rows", g.rows);
  read(s, n, "cols", g.cols);
  read(s, n, "cell_size_m", g.cell_size_m);
  read(s, n, "poi_categories", g.poi_categories);
  read(s, n, "transport_lines", g.transport_lines);
  read(s, n, "days", g.days);
  read(s, n, "hubs", g.hubs);
  read(s, n, "base_amplitude", g.base_amplitude);
  read(s, n, "hub_amplitude", g.hub_amplitude);
  read(s, n, "rush_amplitude", g.rush_amplitude);
  read(s, n, "noise", g.noise);
  read(s, n, "rain_damping", g.rain_damping);
  read(s, n, "cloudy_damping", g.cloudy_damping);
  read(s, n, "holiday_poi_factor", g.holiday_poi_factor);
  read(s, n, "holiday_period", g.holiday_period);
  read(s, n, "weather_persistence", g.weather_persistence);
  read(s, n, "station_spacing", g.station_spacing);
  validate(g);
  return g;
}

constexpr std::initializer_list<const char*> kGeneratorKeys = {
    "rows", "cols", "cell_size_m", "poi_categories", "transport_lines", "days", "hubs",
    "base_amplitude", "hub_amplitude", "rush_amplitude", "noise", "rain_damping",
    "cloudy_damping", "holiday_poi_factor", "holiday_period", "weather_persistence",
    "station_spacing"};

json run_json(const RunConfig& c) {
  const auto& m = c.model;
  return json{
      {"seed", c.seed},
      {"model",
       {{"cheb_order", m.cheb_order},
        {"gcn_features", m.gcn_features},
        {"gru_hidden", m.gru_hidden},
        {"embedding",
         {{"hour", m.embedding.hour},
          {"weather", m.embedding.weather},
          {"holiday", m.embedding.holiday}}},
        {"window", m.window},
        {"activation", std::string(to_string(m.activation))},
        {"gcn_bias", m.gcn_bias}}},
      {"graph", {{"theta", c.graph.theta}, {"kappa", c.graph.kappa}, {"gamma", c.graph.gamma}}},
      {"optimizer",
       {{"lr", c.training.adam.lr},
        {"beta1", c.training.adam.beta1},
        {"beta2", c.training.adam.beta2},
        {"epsilon", c.training.adam.epsilon}}},
      {"training",
       {{"epochs", c.training.epochs},
        {"batch_size", c.training.batch_size},
        {"patience", c.training.patience},
        {"clip_norm", c.training.clip_norm}}},
      {"split", {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}}},
      {"generator", generator_json(c.generator)}};
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : root.items()) {
    if (key != "seed" && key != "model" && key != "graph" && key != "optimizer" &&
        key != "training" && key != "split" && key != "generator") {
      throw ConfigError("unknown config section '" + key +
                        "' (valid: seed, model, graph, optimizer, training, split, generator)");
    }
  }

  RunConfig c;
  read(root, "", "seed", c.seed);

  const json& m = section(root, "model", {"cheb_order", "gcn_features", "gru_hidden", "embedding",
                                          "window", "activation", "gcn_bias"});
  read(m, "model", "cheb_order", c.model.cheb_order);
  read(m, "model", "gcn_features", c.model.gcn_features);
  read(m, "model", "gru_hidden", c.model.gru_hidden);
  read(m, "model", "window", c.model.window);
  read(m, "model", "gcn_bias", c.model.gcn_bias);
  if (m.contains("activation")) {
    std::string name;
    read(m, "model", "activation", name);
    try {
      c.model.activation = parse_activation(name);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("model.activation: ") + e.what());
    }
  }
  const json& e = section(m, "embedding", {"hour", "weather", "holiday"});
  read(e, "model.embedding", "hour", c.model.embedding.hour);
  read(e, "model.embedding", "weather", c.model.embedding.weather);
  read(e, "model.embedding", "holiday", c.model.embedding.holiday);

  const json& g = section(root, "graph", {"theta", "kappa", "gamma"});
  read(g, "graph", "theta", c.graph.theta);
  read(g, "graph", "kappa", c.graph.kappa);
  read(g, "graph", "gamma", c.graph.gamma);

  const json& o = section(root, "optimizer", {"lr", "beta1", "beta2", "epsilon"});
  read(o, "optimizer", "lr", c.training.adam.lr);
  read(o, "optimizer", "beta1", c.training.adam.beta1);
  read(o, "optimizer", "beta2", c.training.adam.beta2);
  read(o, "optimizer", "epsilon", c.training.adam.epsilon);

  const json& t = section(root, "training", {"epochs", "batch_size", "patience", "clip_norm"});
  read(t, "training", "epochs", c.training.epochs);
  read(t, "training", "batch_size", c.training.batch_size);
  read(t, "training", "patience", c.training.patience);
  read(t, "training", "clip_norm", c.training.clip_norm);

  const json& s = section(root, "split", {"train", "val", "test"});
  read(s, "split", "train", c.split.train);
  read(s, "split", "val", c.split.val);
  read(s, "split", "test", c.split.test);

  c.generator = generator_from(section(root, "generator", kGeneratorKeys));

  c.model.validate();
  if (!(c.graph.theta > 0.0) || !(c.graph.kappa > 0.0)) {
    throw ConfigError("graph.theta and graph.kappa must be positive");
  }
  if (!(c.graph.gamma >= 0.0 && c.graph.gamma <= 1.0)) {
    throw ConfigError("graph.gamma must lie in [0, 1]");
  }
  if (!(c.training.adam.lr >= 0.0)) throw ConfigError("optimizer.lr must be nonnegative");
  if (c.training.epochs < 0) throw ConfigError("training.epochs must be nonnegative");
  if (c.training.batch_size < 1) throw ConfigError("training.batch_size must be positive");
  if (c.training.patience < 0) throw ConfigError("training.patience must be nonnegative");
  if (!(c.training.clip_norm > 0.0)) throw ConfigError("training.clip_norm must be positive");
  if (!(c.split.train > 0.0 && c.split.val > 0.0 && c.split.test > 0.0) ||
      std::abs(c.split.train + c.split.val + c.split.test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be positive and sum to 1");
  }
  c.training.seed = c.seed;
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string to_json(const RunConfig& config, int indent) { return run_json(config).dump(indent); }

std::string to_json(const GeneratorConfig& config, int indent) {
  return generator_json(config).dump(indent);
}

GeneratorConfig parse_generator_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("generator config is not valid JSON: ") + e.what());
  }
  const json wrapper{{"generator", root}};
  return generator_from(section(wrapper, "generator", kGeneratorKeys));
}

std::string config_hash(const RunConfig& config) {
  json j = run_json(config);
  j.erase("seed");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace acmv
