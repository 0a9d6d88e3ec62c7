#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "regnn/checkpoint.hpp"
#include "regnn/cli.hpp"
#include "regnn/hgraph.hpp"

using namespace regnn;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

}  // namespace

TEST_CASE("gen writes a loadable graph deterministically") {
  TempDir dir("regnn_cli_gen");
  std::string out = dir / "g.json";
  CHECK(run_command({"gen", "--preset", "acm", "--seed", "9", "--out", out}) == 0);
  HeteroGraph g = load_graph(out);
  CHECK(g.num_types() == 3);
  std::string first = slurp(out);
  CHECK(run_command({"gen", "--preset", "acm", "--seed", "9", "--out", out}) == 0);
  CHECK(slurp(out) == first);
}

TEST_CASE("train twice with the same seed produces identical reports") {
  TempDir dir("regnn_cli_train");
  std::string graph = dir / "g.json";
  REQUIRE(run_command({"gen", "--preset", "acm", "--seed", "3", "--out", graph}) == 0);
  auto train_once = [&](const std::string& out) {
    return run_command({"train", "--graph", graph, "--seed", "5", "--out", out, "--layers", "2",
                        "--hidden", "8", "--epochs", "8", "--patience", "8"});
  };
  REQUIRE(train_once(dir / "a") == 0);
  REQUIRE(train_once(dir / "b") == 0);
  // identical apart from the wall-clock line
  auto strip_timing = [](std::string text) {
    auto at = text.find("\"wall_seconds\"");
    REQUIRE(at != std::string::npos);
    auto end = text.find('\n', at);
    text.erase(at, end - at);
    return text;
  };
  CHECK(strip_timing(slurp(dir / "a/report.json")) == strip_timing(slurp(dir / "b/report.json")));
  CHECK(slurp(dir / "a/checkpoint.json") == slurp(dir / "b/checkpoint.json"));
}

TEST_CASE("eval prints metrics for a checkpoint") {
  TempDir dir("regnn_cli_eval");
  std::string graph = dir / "g.json";
  REQUIRE(run_command({"gen", "--preset", "separable", "--seed", "4", "--out", graph}) == 0);
  REQUIRE(run_command({"train", "--graph", graph, "--seed", "2", "--out", dir / "run", "--layers",
                       "2", "--hidden", "8", "--epochs", "10", "--patience", "10"}) == 0);
  CHECK(run_command({"eval", "--graph", graph, "--checkpoint", dir / "run/checkpoint.json"}) == 0);
}

TEST_CASE("inspect-weights: the planted informative relation dominates") {
  TempDir dir("regnn_cli_inspect");
  std::string graph = dir / "g.json";
  // one informative relation among neutral ones; 400-node training split
  std::string spec = dir / "spec.json";
  {
    std::ofstream f(spec);
    f << R"({"types": [["src", 600], ["item", 1100]], "target": "item", "classes": 2,
            "relations": [
              {"name": "info", "src": "src", "dst": "item", "homophily": 0.95, "edges_per_dst": 6},
              {"name": "noise1", "src": "src", "dst": "item", "homophily": 0.5, "edges_per_dst": 6},
              {"name": "noise2", "src": "src", "dst": "item", "homophily": 0.5, "edges_per_dst": 6}],
            "feature_dim": 10, "separation": 1.2, "noise": 0.5, "uninformative": ["item"]})";
  }
  REQUIRE(run_command({"gen", "--config", spec, "--seed", "8", "--out", graph}) == 0);

  auto alphas_for_seed = [&](const std::string& seed) {
    // lambda 10: large enough to separate the weights, small enough that the
    // embeddings cannot collapse before the projections pick up the signal
    REQUIRE(run_command({"train", "--graph", graph, "--seed", seed, "--out", dir / "run",
                         "--layers", "2", "--hidden", "16", "--epochs", "150", "--patience", "60",
                         "--no-reverse", "--dropout", "0.3", "--lambda", "10"}) == 0);
    std::string csv = dir / "w.csv";
    REQUIRE(run_command({"inspect-weights", "--checkpoint", dir / "run/checkpoint.json", "--out",
                         csv}) == 0);
    std::ifstream in(csv);
    std::string line;
    std::map<int, std::map<std::string, double>> alpha;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("layer,", 0) == 0) continue;
      std::stringstream ss(line);
      std::string layer, kind, name, value;
      std::getline(ss, layer, ',');
      std::getline(ss, kind, ',');
      std::getline(ss, name, ',');
      std::getline(ss, value, ',');
      if (kind == "relation") alpha[std::stoi(layer)][name] = std::stod(value);
    }
    REQUIRE(!alpha.empty());
    return alpha;
  };

  for (const std::string seed : {"1", "2"}) {
    auto alpha = alphas_for_seed(seed);
    bool dominated = false;
    for (auto& [layer, weights] : alpha)
      if (weights.at("info") > weights.at("noise1") && weights.at("info") > weights.at("noise2"))
        dominated = true;
    CHECK(dominated);
  }
}

TEST_CASE("verify command exits 0 and reports every check as pass") {
  TempDir dir("regnn_cli_verify");
  std::string out = dir / "verify.json";
  CHECK(run_command({"verify", "--seed", "5", "--out", out}) == 0);
  std::string text = slurp(out);
  CHECK(text.find("\"all_pass\": true") != std::string::npos);
  CHECK(text.find("\"pass\": false") == std::string::npos);
}

TEST_CASE("exit codes for bad usage and missing files") {
  CHECK(run_command({"train", "--graph", "/nonexistent/g.json"}) == 2);
  CHECK(run_command({"bogus-subcommand"}) == 2);
  CHECK(run_command({"gen", "--not-a-flag"}) == 2);
  CHECK(run_command({}) == 2);
}
