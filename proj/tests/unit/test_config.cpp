// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "acmv/config.hpp"
#include "acmv/errors.hpp"

using namespace acmv;

TEST_CASE("empty config yields the defaults") {
  const RunConfig c = parse_run_config("{}");
  const RunConfig d;
  CHECK(to_json(c) == to_json(d));
  CHECK(c.model.cheb_order == 3);
  CHECK(c.model.window == 8);
  CHECK(c.training.seed == c.seed);
}

TEST_CASE("canonical JSON round trips") {
  RunConfig c;
  c.seed = 123;
  c.model.gcn_features = {4, 4, 1};
  c.model.activation = Activation::tanh;
  c.model.embedding.hour = 6;
  c.graph.gamma = 0.25;
  c.training.adam.lr = 3e-4;
  c.training.epochs = 17;
  c.split = {0.6, 0.2, 0.2};
  c.generator.rows = 5;
  c.generator.noise = 0.5;
  const std::string text = to_json(c);
  const RunConfig back = parse_run_config(text);
  CHECK(to_json(back) == text);
  CHECK(back.seed == 123);
  CHECK(back.training.seed == 123);
  CHECK(back.model.gcn_features == std::vector<int>{4, 4, 1});
  CHECK(back.model.activation == Activation::tanh);
  CHECK(back.generator.noise == 0.5);

  // keys come out sorted
  const auto j = nlohmann::json::parse(text);
  std::string prev;
  for (const auto& [key, value] : j.items()) {
    CHECK(prev < key);
    prev = key;
  }
}

TEST_CASE("partial sections override single keys") {
  const RunConfig c =
      parse_run_config(R"({"seed": 9, "training": {"epochs": 5}, "model": {"embedding": {"hour": 3}}})");
  CHECK(c.seed == 9);
  CHECK(c.training.epochs == 5);
  CHECK(c.training.batch_size == RunConfig{}.training.batch_size);
  CHECK(c.model.embedding.hour == 3);
  CHECK(c.model.embedding.weather == EmbeddingDims{}.weather);
}

TEST_CASE("config hash ignores the seed only") {
  RunConfig a;
  RunConfig b = a;
  b.seed = a.seed + 1;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.training.epochs += 1;
  CHECK(config_hash(a) != config_hash(b));
  RunConfig g = a;
  g.generator.days += 1;
  CHECK(config_hash(a) != config_hash(g));
}

TEST_CASE("invalid configs are rejected") {
  const char* bad[] = {
      "[1, 2]",
      "{not json",
      R"({"modle": {}})",
      R"({"model": {"cheb_ordr": 2}})",
      R"({"model": {"cheb_order": 0}})",
      R"({"model": {"cheb_order": "three"}})",
      R"({"model": {"gcn_features": []}})",
      R"({"model": {"activation": "gelu"}})",
      R"({"model": {"embedding": {"hour": 0}}})",
      R"({"graph": {"gamma": 1.5}})",
      R"({"graph": {"theta": -1}})",
      R"({"optimizer": {"lr": -0.1}})",
      R"({"training": {"batch_size": 0}})",
      R"({"training": {"clip_norm": 0}})",
      R"({"split": {"train": 0.9, "val": 0.2, "test": 0.1}})",
      R"({"generator": {"rows": 0}})",
      R"({"generator": {"colour": 1}})",
      R"({"training": 5})",
  };
  for (const char* text : bad) {
    INFO(text);
    CHECK_THROWS_AS(parse_run_config(text), ConfigError);
  }
}

TEST_CASE("generator config on its own") {
  GeneratorConfig g;
  g.days = 3;
  g.hub_amplitude = 10.0;
  const GeneratorConfig back = parse_generator_config(to_json(g));
  CHECK(back.days == 3);
  CHECK(back.hub_amplitude == 10.0);
  CHECK(to_json(back) == to_json(g));
  CHECK_THROWS_AS(parse_generator_config(R"({"days": 0})"), ConfigError);
}

TEST_CASE("shipped config files parse") {
  const std::filesystem::path dir = ACMV_CONFIG_DIR;
  for (const char* name : {"default.json", "acceptance.json"}) {
    INFO(name);
    CHECK_NOTHROW(load_run_config(dir / name));
  }
  CHECK(to_json(load_run_config(dir / "default.json")) == to_json(RunConfig{}));
  CHECK_THROWS_AS(load_run_config(dir / "missing.json"), IoError);
}
