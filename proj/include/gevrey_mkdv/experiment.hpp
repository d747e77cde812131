#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gevrey_mkdv/bourgain_diag.hpp"
#include "gevrey_mkdv/initial_data.hpp"
#include "gevrey_mkdv/mkdv_solver.hpp"

namespace gmkdv {

enum class Scenario {
  Conservation,
  SigmaScaling,
  RadiusTrack,
  Inequalities,
  SolitonValidate,
  Strichartz,
};

std::string to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& name);
const std::vector<Scenario>& all_scenarios();

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitBlowUp = 3;
inline constexpr int kExitUntrusted = 4;

struct StrichartzSweep {
  double t_blk = 1.0;
  std::vector<double> widths;
  std::vector<double> amplitudes;
  bool refine = true;
  StrichartzOptions options;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::Conservation;
  Index n = 1024;
  double half_length = 0.0;
  SolverConfig solver;
  std::vector<double> sigmas;
  double s = 2.0;
  InitialData u0;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";

  double sample_dt = 0.025;
  bool halving = true;

  double radius_t0 = 1.0;
  std::optional<double> noise_floor;

  std::size_t inequality_samples = 100000;
  std::vector<double> thetas;
  int max_p = 4;

  double soliton_speed = 1.0;
  double soliton_x0 = 0.0;

  StrichartzSweep strichartz;

  /// Fully resolved document without out_dir; the config hash is taken over
  /// its canonical dump.
  nlohmann::json canonical;

  GridD grid() const { return GridD(n, half_length); }
};

/// Every key a config may carry, filled with the scenario's defaults.
nlohmann::json default_config(Scenario scenario);

/// Applies "a.b.c=value". The value is parsed as JSON when possible and kept
/// as a string otherwise.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Merges `user` over the scenario defaults, rejects unknown keys and wrong
/// types, and validates every field, including the sigma gate. Throws
/// InvalidInput, or OverflowError for a sigma above safe_sigma_max.
ExperimentConfig parse_config(Scenario scenario, const nlohmann::json& user);

/// FNV-1a (64 bit) of the canonical JSON dump.
std::uint64_t config_hash(const nlohmann::json& canonical);
std::string config_hash_hex(const nlohmann::json& canonical);

/// --threads, else GEVREY_MKDV_THREADS, else 1.
int resolve_threads(std::optional<int> flag);

/// Runs the scenario and writes its artifacts into cfg.out_dir. Returns one
/// of the kExit* codes; failures also leave error.json behind.
int run(const ExperimentConfig& cfg, int threads = 1);

/// Writes error.json for a failure that happened before a config existed.
void write_error_record(const std::filesystem::path& out_dir, int exit_code,
                        const std::string& kind, const std::string& message);

}  // namespace gmkdv
