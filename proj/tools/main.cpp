#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gevrey_mkdv/errors.hpp"
#include "gevrey_mkdv/experiment.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

int execute(gmkdv::Scenario scenario, const Flags& flags) {
  const std::string fallback_dir = flags.out_dir.empty() ? "out" : flags.out_dir;
  nlohmann::json doc = nlohmann::json::object();
  gmkdv::ExperimentConfig cfg;
  int threads = 1;
  try {
    if (!flags.config_path.empty()) {
      std::ifstream in(flags.config_path);
      if (!in) throw gmkdv::InvalidInput("cannot read config file " + flags.config_path);
      doc = nlohmann::json::parse(in, nullptr, false);
      if (doc.is_discarded()) {
        throw gmkdv::InvalidInput("config file " + flags.config_path + " is not valid JSON");
      }
    }
    for (const auto& assignment : flags.overrides) gmkdv::apply_override(doc, assignment);
    if (flags.seed) doc["seed"] = *flags.seed;
    if (!flags.out_dir.empty()) doc["out_dir"] = flags.out_dir;
    threads = gmkdv::resolve_threads(flags.threads);
    cfg = gmkdv::parse_config(scenario, doc);
  } catch (const gmkdv::OverflowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    gmkdv::write_error_record(fallback_dir, gmkdv::kExitUntrusted, "sigma_gate", e.what());
    return gmkdv::kExitUntrusted;
  } catch (const gmkdv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    gmkdv::write_error_record(fallback_dir, gmkdv::kExitInvalidConfig, "invalid_config",
                              e.what());
    return gmkdv::kExitInvalidConfig;
  }

  const int code = gmkdv::run(cfg, threads);
  if (code != gmkdv::kExitOk) {
    std::cerr << "run failed with exit code " << code << "; see "
              << (cfg.out_dir / "error.json").string() << "\n";
  } else {
    std::cout << "wrote " << (cfg.out_dir / "summary.json").string() << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral mKdV experiments with cosh-weighted Gevrey diagnostics"};
  app.require_subcommand(1);

  Flags flags;
  std::optional<gmkdv::Scenario> chosen;
  for (gmkdv::Scenario scenario : gmkdv::all_scenarios()) {
    auto* sub = app.add_subcommand(gmkdv::to_string(scenario),
                                   "run the " + gmkdv::to_string(scenario) + " scenario");
    sub->add_option("--config", flags.config_path, "JSON config file");
    sub->add_option("--set", flags.overrides, "override one key, e.g. solver.dt=1e-4")
        ->take_all();
    sub->add_option("--out", flags.out_dir, "output directory");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--threads", flags.threads,
                    "worker threads (default: GEVREY_MKDV_THREADS or 1)");
    sub->callback([&chosen, scenario] { chosen = scenario; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gmkdv::kExitInvalidConfig;
  }

  try {
    return execute(*chosen, flags);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
