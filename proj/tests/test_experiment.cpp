#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gevrey_mkdv/experiment.hpp"

using namespace gmkdv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gmkdv_test_experiment" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& path) { return json::parse(slurp(path)); }

json with(std::initializer_list<std::string> assignments) {
  json doc = json::object();
  for (const auto& a : assignments) apply_override(doc, a);
  return doc;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(GMKDV_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("scenario names") {
  CHECK(all_scenarios().size() == 6);
  for (Scenario s : all_scenarios()) CHECK(scenario_from_string(to_string(s)) == s);
  CHECK(to_string(Scenario::SolitonValidate) == "soliton-validate");
  CHECK_THROWS_AS(scenario_from_string("blowup"), InvalidInput);
}

TEST_CASE("overrides") {
  json doc = json::object();
  apply_override(doc, "solver.dt=1e-4");
  apply_override(doc, "u0.preset=gaussian");
  apply_override(doc, "gevrey.sigma=[0.1, 0.2]");
  apply_override(doc, "identity.halving=false");
  CHECK(doc["solver"]["dt"].get<double>() == 1e-4);
  CHECK(doc["u0"]["preset"] == "gaussian");
  CHECK(doc["gevrey"]["sigma"].size() == 2);
  CHECK(doc["identity"]["halving"] == false);
  CHECK_THROWS_AS(apply_override(doc, "solver.dt"), InvalidInput);
  CHECK_THROWS_AS(apply_override(doc, "=3"), InvalidInput);
}

TEST_CASE("config parsing and validation") {
  const ExperimentConfig d = parse_config(Scenario::Conservation, json::object());
  CHECK(d.n == 1024);
  CHECK(d.half_length == doctest::Approx(32.0 * std::numbers::pi));
  CHECK(d.solver.mu == -1.0);
  CHECK(d.sigmas == std::vector<double>{0.1});

  const ExperimentConfig s = parse_config(Scenario::SigmaScaling, json::object());
  CHECK(s.sigmas == std::vector<double>{0.4, 0.2, 0.1, 0.05, 0.025});

  const ExperimentConfig r = parse_config(Scenario::RadiusTrack, with({"grid.L=8pi"}));
  CHECK(r.half_length == doctest::Approx(8.0 * std::numbers::pi));
  CHECK(r.u0.preset == Preset::PlantedSpectrum);
  CHECK(parse_config(Scenario::Conservation, with({"grid.L=12.5", "u0.preset=cosine"})).half_length == 12.5);

  CHECK_THROWS_AS(parse_config(Scenario::Conservation, with({"solver.dtt=0.1"})), InvalidInput);
  CHECK_THROWS_AS(parse_config(Scenario::Conservation, with({"extra=1"})), InvalidInput);
  CHECK_THROWS_AS(parse_config(Scenario::Conservation, with({"solver.dt=fast"})), InvalidInput);
  CHECK_THROWS_AS(parse_config(Scenario::Conservation, with({"grid.n=1000"})), InvalidInput);
  CHECK_THROWS_AS(parse_config(Scenario::Conservation, with({"solver.mu=2"})), InvalidInput);
  CHECK_THROWS_AS(parse_config(Scenario::Conservation, with({"u0.preset=square"})), InvalidInput);
  CHECK_THROWS_AS(parse_config(Scenario::Conservation, with({"grid.L=pi8"})), InvalidInput);
  CHECK_THROWS_AS(parse_config(Scenario::Conservation, with({"sampling.dt=-1"})), InvalidInput);
}

TEST_CASE("sigma gate reports the bound") {
  try {
    parse_config(Scenario::Conservation, with({"gevrey.sigma=[5.0]"}));
    FAIL("expected OverflowError");
  } catch (const OverflowError& e) {
    CHECK(std::string(e.what()).find("safe_sigma_max") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(Scenario::SigmaScaling, with({"gevrey.sigma=[0.1, 9]"})),
                  OverflowError);
}

TEST_CASE("config hash") {
  const ExperimentConfig a = parse_config(Scenario::Conservation, json::object());
  const ExperimentConfig b = parse_config(Scenario::Conservation, with({"out_dir=elsewhere"}));
  const ExperimentConfig c = parse_config(Scenario::Conservation, with({"solver.dt=0.005"}));
  const ExperimentConfig e = parse_config(Scenario::Conservation, with({"seed=3"}));
  CHECK(config_hash(a.canonical) == config_hash(b.canonical));
  CHECK(config_hash(a.canonical) != config_hash(c.canonical));
  CHECK(config_hash(a.canonical) != config_hash(e.canonical));
  CHECK(config_hash_hex(a.canonical).size() == 16);
  CHECK(b.out_dir == "elsewhere");
}

TEST_CASE("thread count resolution") {
  ::unsetenv("GEVREY_MKDV_THREADS");
  CHECK(resolve_threads(std::nullopt) == 1);
  ::setenv("GEVREY_MKDV_THREADS", "3", 1);
  CHECK(resolve_threads(std::nullopt) == 3);
  CHECK(resolve_threads(5) == 5);
  ::setenv("GEVREY_MKDV_THREADS", "many", 1);
  CHECK_THROWS_AS(resolve_threads(std::nullopt), InvalidInput);
  ::unsetenv("GEVREY_MKDV_THREADS");
  CHECK_THROWS_AS(resolve_threads(0), InvalidInput);
}

TEST_CASE("inequalities run is reproducible byte for byte") {
  const fs::path a = scratch("ineq_a"), b = scratch("ineq_b"), c = scratch("ineq_c");
  auto config = [](const fs::path& dir) {
    json doc = with({"inequalities.samples=20000", "seed=7"});
    doc["out_dir"] = dir.string();
    return parse_config(Scenario::Inequalities, doc);
  };
  CHECK(run(config(a), 1) == kExitOk);
  CHECK(run(config(b), 1) == kExitOk);
  CHECK(run(config(c), 4) == kExitOk);
  for (const char* file : {"inequalities.csv", "inequalities.json", "summary.json", "config.json"}) {
    CHECK(slurp(a / file) == slurp(b / file));
    CHECK(slurp(a / file) == slurp(c / file));
  }
  const json summary = read_json(a / "summary.json");
  CHECK(summary["all_hold"] == true);
  CHECK(summary["status"] == "ok");
  CHECK(summary["reports"].size() == 2 * 3 + 1 + 4);
  CHECK_FALSE(fs::exists(a / "error.json"));

  const std::string csv = slurp(a / "inequalities.csv");
  const std::string first = "# config_hash=" + summary["config_hash"].get<std::string>() + "\r\n";
  CHECK(csv.rfind(first, 0) == 0);
  CHECK(csv.substr(first.size()).rfind("inequality,parameter,count,worst_margin,holds,argmax\r\n", 0) == 0);
}

TEST_CASE("soliton run writes its series") {
  const fs::path dir = scratch("soliton");
  json doc = with({"solver.t_final=0.2", "solver.dt=0.002", "sampling.dt=0.05"});
  doc["out_dir"] = dir.string();
  REQUIRE(run(parse_config(Scenario::SolitonValidate, doc)) == kExitOk);
  const json s = read_json(dir / "summary.json");
  CHECK(s["final_linf_error"].get<double>() < 1e-6);
  std::ifstream in(dir / "soliton.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# config_hash=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "t,linf_error,l2_error,mass_relative_drift\r");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("failure exit codes leave an error record") {
  SUBCASE("cfl violation at launch") {
    const fs::path dir = scratch("cfl");
    json doc = with({"u0.amp=10", "solver.t_final=0.1"});
    doc["out_dir"] = dir.string();
    CHECK(run(parse_config(Scenario::Conservation, doc)) == kExitInvalidConfig);
    const json err = read_json(dir / "error.json");
    CHECK(err["error"] == "cfl");
    CHECK(err["exit_code"] == kExitInvalidConfig);
    CHECK(read_json(dir / "summary.json")["status"] == "cfl");
  }
  SUBCASE("untrusted radius estimate") {
    const fs::path dir = scratch("untrusted");
    json doc = with({"grid.n=256", "u0.preset=cosine", "solver.t_final=1", "sampling.dt=0.5",
                     "radius.t0=0.25"});
    doc["out_dir"] = dir.string();
    CHECK(run(parse_config(Scenario::RadiusTrack, doc)) == kExitUntrusted);
    CHECK(read_json(dir / "error.json")["error"] == "untrusted");
  }
  SUBCASE("stale error records are removed") {
    const fs::path dir = scratch("stale");
    fs::create_directories(dir);
    std::ofstream(dir / "error.json") << "{}";
    json doc = with({"inequalities.samples=100"});
    doc["out_dir"] = dir.string();
    CHECK(run(parse_config(Scenario::Inequalities, doc)) == kExitOk);
    CHECK_FALSE(fs::exists(dir / "error.json"));
  }
  SUBCASE("error record before a config exists") {
    const fs::path dir = scratch("early");
    write_error_record(dir, kExitInvalidConfig, "invalid_config", "bad key");
    const json err = read_json(dir / "error.json");
    CHECK(err["exit_code"] == kExitInvalidConfig);
    CHECK(err["message"] == "bad key");
  }
}

TEST_CASE("command line surface") {
  const fs::path dir = scratch("cli");
  CHECK(cli("--help") == 0);
  CHECK(cli("") == kExitInvalidConfig);
  CHECK(cli("inequalities --bogus") == kExitInvalidConfig);

  const std::string out = " --out " + (dir / "ok").string();
  CHECK(cli("inequalities --set inequalities.samples=500 --seed 11 --threads 2" + out) == 0);
  CHECK(fs::exists(dir / "ok" / "inequalities.csv"));
  CHECK(read_json(dir / "ok" / "config.json")["seed"] == 11);

  CHECK(cli("conservation --set solver.nonsense=1 --out " + (dir / "bad").string()) ==
        kExitInvalidConfig);
  CHECK(read_json(dir / "bad" / "error.json")["error"] == "invalid_config");

  CHECK(cli("conservation --set gevrey.sigma=[3] --out " + (dir / "gate").string()) ==
        kExitUntrusted);
  CHECK(read_json(dir / "gate" / "error.json")["error"] == "sigma_gate");

  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({"inequalities": {"samples": 300}, "seed": 5})";
  }
  CHECK(cli("inequalities --config " + (dir / "config.json").string() + " --set seed=6" +
            " --out " + (dir / "file").string()) == 0);
  const json used = read_json(dir / "file" / "config.json");
  CHECK(used["inequalities"]["samples"] == 300);
  CHECK(used["seed"] == 6);
  CHECK(cli("inequalities --config " + (dir / "missing.json").string() + " --out " +
            (dir / "missing").string()) == kExitInvalidConfig);
}
