// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kCli = ACMV_CLI_PATH;
const fs::path kConfigs = ACMV_CONFIG_DIR;

int run(const std::string& args) {
  const std::string cmd = "\"" + kCli.string() + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

struct Workspace {
  fs::path root = fs::temp_directory_path() / "acmv_test_cli";
  fs::path scenario = root / "scenario";
  std::string config = "--config \"" + (kConfigs / "tiny.json").string() + "\"";

  Workspace() {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
  std::string q(const fs::path& p) const { return "\"" + p.string() + "\""; }
};

}  // namespace

TEST_CASE("full command pipeline") {
  Workspace ws;
  REQUIRE(run("synth " + ws.config + " --out " + ws.q(ws.scenario)) == 0);
  for (const char* f : {"series.csv", "contexts.csv", "poi.csv", "transport.csv", "regions.csv",
                        "grid.json", "manifest.json"}) {
    CHECK(fs::exists(ws.scenario / f));
  }
  const auto synth_manifest = nlohmann::json::parse(slurp(ws.scenario / "manifest.json"));
  CHECK(synth_manifest["command"] == "synth");
  CHECK(synth_manifest["outputs"].size() == 6);

  const fs::path t1 = ws.root / "t1";
  REQUIRE(run("train " + ws.config + " --quiet --scenario " + ws.q(ws.scenario) + " --out " +
              ws.q(t1)) == 0);
  for (const char* f : {"checkpoint.bin", "epochs.csv", "metrics.csv", "manifest.json"}) {
    CHECK(fs::exists(t1 / f));
  }
  CHECK(count_lines(t1 / "epochs.csv") == 3);
  CHECK(count_lines(t1 / "metrics.csv") == 2 + 12);

  SUBCASE("training is byte-for-byte reproducible") {
    const fs::path t2 = ws.root / "t2";
    REQUIRE(run("train " + ws.config + " --quiet --scenario " + ws.q(ws.scenario) + " --out " +
                ws.q(t2)) == 0);
    CHECK(slurp(t1 / "epochs.csv") == slurp(t2 / "epochs.csv"));
    CHECK(slurp(t1 / "checkpoint.bin") == slurp(t2 / "checkpoint.bin"));
    CHECK(slurp(t1 / "metrics.csv") == slurp(t2 / "metrics.csv"));

    const fs::path t3 = ws.root / "t3";
    REQUIRE(run("train " + ws.config + " --seed 4 --quiet --scenario " + ws.q(ws.scenario) +
                " --out " + ws.q(t3)) == 0);
    CHECK(slurp(t1 / "checkpoint.bin") != slurp(t3 / "checkpoint.bin"));
  }
  SUBCASE("evaluate reproduces the training metrics") {
    const fs::path e = ws.root / "eval";
    REQUIRE(run("evaluate --checkpoint " + ws.q(t1 / "checkpoint.bin") + " --scenario " +
                ws.q(ws.scenario) + " --out " + ws.q(e)) == 0);
    CHECK(slurp(e / "metrics.csv") == slurp(t1 / "metrics.csv"));
    const auto m = nlohmann::json::parse(slurp(e / "manifest.json"));
    CHECK(m["command"] == "evaluate");
    CHECK(m["inputs"].size() >= 2);
  }
  SUBCASE("export attention") {
    const fs::path x = ws.root / "export";
    REQUIRE(run("export-attention --checkpoint " + ws.q(t1 / "checkpoint.bin") + " --scenario " +
                ws.q(ws.scenario) + " --out " + ws.q(x)) == 0);
    CHECK(slurp(x / "attention.csv").rfind("t,n,w_dist,w_poi,w_transport\n", 0) == 0);
    const auto geo = nlohmann::json::parse(slurp(x / "attention.geojson"));
    CHECK((count_lines(x / "attention.csv") - 1) == static_cast<int>(geo["features"].size()));
    const auto m = nlohmann::json::parse(slurp(x / "manifest.json"));
    const int from = m["from"], to = m["to"];
    CHECK(geo["features"].size() == static_cast<std::size_t>((to - from) * 12));

    CHECK(run("export-attention --checkpoint " + ws.q(t1 / "checkpoint.bin") + " --scenario " +
              ws.q(ws.scenario) + " --from 0 --to 5 --out " + ws.q(ws.root / "bad")) == 2);
  }
  SUBCASE("a different config is refused") {
    CHECK(run("evaluate --config " + ws.q(kConfigs / "default.json") + " --checkpoint " +
              ws.q(t1 / "checkpoint.bin") + " --scenario " + ws.q(ws.scenario) + " --out " +
              ws.q(ws.root / "e2")) == 2);
  }
  SUBCASE("corrupt checkpoint") {
    std::ofstream(t1 / "checkpoint.bin", std::ios::binary) << "garbage";
    CHECK(run("evaluate --checkpoint " + ws.q(t1 / "checkpoint.bin") + " --scenario " +
              ws.q(ws.scenario) + " --out " + ws.q(ws.root / "e3")) == 2);
  }
}

TEST_CASE("compare writes runs and summary") {
  Workspace ws;
  REQUIRE(run("synth " + ws.config + " --out " + ws.q(ws.scenario)) == 0);
  const fs::path c = ws.root / "cmp";
  REQUIRE(run("compare " + ws.config + " --quiet --scenario " + ws.q(ws.scenario) +
              " --variants ha,dist,acmv-gcns --seeds 1,2 --jobs 2 --out " + ws.q(c)) == 0);
  CHECK(count_lines(c / "runs.csv") == 1 + 6);
  CHECK(count_lines(c / "summary.csv") == 1 + 3);
  CHECK(nlohmann::json::parse(slurp(c / "manifest.json"))["failures"].empty());
}

TEST_CASE("usage and data errors exit with 2") {
  Workspace ws;
  CHECK(run("") != 0);
  CHECK(run("synth") == 2);
  CHECK(run("frobnicate --out x") == 2);
  CHECK(run("synth --config " + ws.q(ws.root / "missing.json") + " --out " + ws.q(ws.scenario)) == 2);
  std::ofstream(ws.root / "bad.json") << R"({"model": {"window": 0}})";
  CHECK(run("synth --config " + ws.q(ws.root / "bad.json") + " --out " + ws.q(ws.scenario)) == 2);
  CHECK(run("train --scenario " + ws.q(ws.root / "nowhere") + " --out " + ws.q(ws.root / "t")) == 2);
  REQUIRE(run("synth " + ws.config + " --out " + ws.q(ws.scenario)) == 0);
  CHECK(run("train " + ws.config + " --variant lstm --scenario " + ws.q(ws.scenario) + " --out " +
            ws.q(ws.root / "t")) == 2);
  CHECK(run("train " + ws.config + " --variant ha --scenario " + ws.q(ws.scenario) + " --out " +
            ws.q(ws.root / "t")) == 2);
}

TEST_CASE("diverging training exits with 3") {
  Workspace ws;
  REQUIRE(run("synth " + ws.config + " --out " + ws.q(ws.scenario)) == 0);
  auto cfg = nlohmann::json::parse(slurp(kConfigs / "tiny.json"));
  cfg["optimizer"]["lr"] = 1e300;
  cfg["training"]["clip_norm"] = 1e300;
  std::ofstream(ws.root / "diverge.json") << cfg.dump();
  CHECK(run("train --config " + ws.q(ws.root / "diverge.json") + " --quiet --scenario " +
            ws.q(ws.scenario) + " --out " + ws.q(ws.root / "t")) == 3);
}
