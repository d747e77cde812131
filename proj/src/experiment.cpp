#include "gevrey_mkdv/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "gevrey_mkdv/commutator_remainder.hpp"
#include "gevrey_mkdv/energies.hpp"
#include "gevrey_mkdv/gevrey_weights.hpp"

namespace gmkdv {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// names

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::Conservation: return "conservation";
    case Scenario::SigmaScaling: return "sigma-scaling";
    case Scenario::RadiusTrack: return "radius-track";
    case Scenario::Inequalities: return "inequalities";
    case Scenario::SolitonValidate: return "soliton-validate";
    case Scenario::Strichartz: return "strichartz";
  }
  return "unknown";
}

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> list{
      Scenario::Conservation, Scenario::SigmaScaling,   Scenario::RadiusTrack,
      Scenario::Inequalities, Scenario::SolitonValidate, Scenario::Strichartz};
  return list;
}

Scenario scenario_from_string(const std::string& name) {
  for (Scenario s : all_scenarios()) {
    if (to_string(s) == name) return s;
  }
  throw InvalidInput("unknown scenario '" + name + "'");
}

// ---------------------------------------------------------------------------
// configuration

json default_config(Scenario scenario) {
  json doc = {
      {"scenario", to_string(scenario)},
      {"grid", {{"n", 1024}, {"L", "32pi"}}},
      {"solver",
       {{"mu", -1}, {"dt", 0.01}, {"t_final", 5.0}, {"dealias", 2},
        {"scheme", "ifrk4"}}},
      {"gevrey", {{"sigma", json::array({0.1})}, {"s", 2.0}}},
      {"u0",
       {{"preset", "sech"}, {"amp", 1.0}, {"width", 2.0}, {"mode", 1},
        {"sigma0", 0.3}}},
      {"sampling", {{"dt", 0.025}}},
      {"identity", {{"halving", true}}},
      {"radius", {{"t0", 1.0}, {"noise_floor", nullptr}}},
      {"inequalities",
       {{"samples", 100000}, {"thetas", json::array({0.0, 0.5, 1.0})},
        {"max_p", 4}}},
      {"soliton", {{"speed", 1.0}, {"x0", 0.0}}},
      {"strichartz",
       {{"t_blk", 1.0},
        {"widths", json::array({0.5, 1.0, 2.0, 4.0})},
        {"amplitudes", json::array({0.5, 1.0, 2.0})},
        {"refine", true},
        {"b", 0.6},
        {"s_maximal", 0.8},
        {"window", "raised_cosine"},
        {"time_samples", 0}}},
      {"seed", 0},
      {"out_dir", "out"},
  };
  switch (scenario) {
    case Scenario::Conservation:
      break;
    case Scenario::SigmaScaling:
      doc["solver"]["dt"] = 0.005;
      doc["solver"]["t_final"] = 1.0;
      doc["gevrey"]["sigma"] = json::array({0.4, 0.2, 0.1, 0.05, 0.025});
      doc["sampling"]["dt"] = 0.05;
      break;
    case Scenario::RadiusTrack:
      doc["grid"] = {{"n", 2048}, {"L", "8pi"}};
      doc["solver"]["dt"] = 0.005;
      doc["solver"]["t_final"] = 50.0;
      doc["gevrey"]["sigma"] = json::array();
      doc["u0"]["preset"] = "planted-spectrum";
      doc["sampling"]["dt"] = 0.5;
      break;
    case Scenario::Inequalities:
      doc["gevrey"]["sigma"] = json::array();
      break;
    case Scenario::SolitonValidate:
      doc["solver"]["mu"] = 1;
      doc["solver"]["dt"] = 1e-3;
      doc["solver"]["t_final"] = 1.0;
      doc["gevrey"]["sigma"] = json::array();
      doc["sampling"]["dt"] = 0.1;
      break;
    case Scenario::Strichartz:
      doc["grid"] = {{"n", 512}, {"L", "16pi"}};
      doc["gevrey"]["sigma"] = json::array();
      break;
  }
  return doc;
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw InvalidInput("override '" + std::string(assignment) +
                       "' is not of the form key.path=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw InvalidInput("empty key in override '" + path + "'");
    if (!node->is_object()) *node = json::object();
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json value = json::parse(text, nullptr, false);
  *node = value.is_discarded() ? json(text) : std::move(value);
}

namespace {

void merge_into(json& base, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it->is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
      merge_into(base[it.key()], *it);
    } else {
      base[it.key()] = *it;
    }
  }
}

void reject_unknown_keys(const json& user, const json& known,
                         const std::string& prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!known.contains(it.key())) throw InvalidInput("unknown config key '" + path + "'");
    const json& expected = known[it.key()];
    if (expected.is_object()) {
      if (!it->is_object()) throw InvalidInput("config key '" + path + "' must be an object");
      reject_unknown_keys(*it, expected, path);
    }
  }
}

const json& at_path(const json& doc, const std::string& path) {
  const json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    node = &node->at(path.substr(start, dot - start));
    if (dot == std::string::npos) return *node;
    start = dot + 1;
  }
}

template <typename T>
T read(const json& doc, const std::string& path) {
  try {
    const json& v = at_path(doc, path);
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw InvalidInput("config key '" + path + "' must be a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) {
        throw InvalidInput("config key '" + path + "' must be an integer");
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (v.get<std::int64_t>() < 0) {
          throw InvalidInput("config key '" + path + "' must be non-negative");
        }
      }
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput("config key '" + path + "': " + e.what());
  }
}

std::vector<double> read_list(const json& doc, const std::string& path) {
  const json& v = at_path(doc, path);
  if (!v.is_array()) throw InvalidInput("config key '" + path + "' must be an array");
  std::vector<double> out;
  for (const auto& item : v) {
    if (!item.is_number()) throw InvalidInput("config key '" + path + "' must hold numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

double parse_length(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw InvalidInput("grid.L must be a number or a string like '32pi'");
  std::string text = v.get<std::string>();
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    std::string head = text.substr(0, text.size() - 2);
    if (!head.empty() && head.back() == '*') head.pop_back();
    double factor = 1.0;
    if (!head.empty()) {
      char* end = nullptr;
      factor = std::strtod(head.c_str(), &end);
      if (end != head.c_str() + head.size()) {
        throw InvalidInput("cannot parse grid.L = '" + text + "'");
      }
    }
    return factor * std::numbers::pi;
  }
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    throw InvalidInput("cannot parse grid.L = '" + text + "'");
  }
  return value;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

bool uses_initial_data(Scenario s) {
  return s == Scenario::Conservation || s == Scenario::SigmaScaling ||
         s == Scenario::RadiusTrack;
}

}  // namespace

ExperimentConfig parse_config(Scenario scenario, const json& user) {
  if (!user.is_object()) throw InvalidInput("config must be a JSON object");
  json doc = default_config(scenario);
  reject_unknown_keys(user, doc, "");
  merge_into(doc, user);
  if (doc["scenario"] != to_string(scenario)) {
    throw InvalidInput("config scenario '" + doc["scenario"].dump() +
                       "' does not match subcommand '" + to_string(scenario) + "'");
  }

  ExperimentConfig cfg;
  cfg.scenario = scenario;
  cfg.n = read<Index>(doc, "grid.n");
  cfg.half_length = parse_length(doc["grid"]["L"]);
  require(std::isfinite(cfg.half_length) && cfg.half_length > 0.0, "grid.L must be positive");
  const GridD grid = cfg.grid();

  const std::string scheme = read<std::string>(doc, "solver.scheme");
  require(scheme == "ifrk4", "solver.scheme must be 'ifrk4'");
  cfg.solver.mu = read<double>(doc, "solver.mu");
  cfg.solver.dt = read<double>(doc, "solver.dt");
  cfg.solver.t_final = read<double>(doc, "solver.t_final");
  cfg.solver.dealias = read<int>(doc, "solver.dealias");
  validate(cfg.solver);

  cfg.sigmas = read_list(doc, "gevrey.sigma");
  cfg.s = read<double>(doc, "gevrey.s");
  require(std::isfinite(cfg.s), "gevrey.s must be finite");
  for (double sigma : cfg.sigmas) {
    require(std::isfinite(sigma) && sigma >= 0.0, "gevrey.sigma entries must be >= 0");
  }

  cfg.u0.preset = preset_from_string(read<std::string>(doc, "u0.preset"));
  cfg.u0.amp = read<double>(doc, "u0.amp");
  cfg.u0.width = read<double>(doc, "u0.width");
  cfg.u0.mode = read<int>(doc, "u0.mode");
  cfg.u0.sigma0 = read<double>(doc, "u0.sigma0");
  require(std::isfinite(cfg.u0.amp) && cfg.u0.amp != 0.0, "u0.amp must be finite and nonzero");

  cfg.seed = read<std::uint64_t>(doc, "seed");
  cfg.out_dir = read<std::string>(doc, "out_dir");
  require(!cfg.out_dir.empty(), "out_dir must not be empty");

  cfg.sample_dt = read<double>(doc, "sampling.dt");
  require(cfg.sample_dt > 0.0 && cfg.sample_dt <= cfg.solver.t_final,
          "sampling.dt must lie in (0, solver.t_final]");
  cfg.halving = read<bool>(doc, "identity.halving");

  cfg.radius_t0 = read<double>(doc, "radius.t0");
  require(cfg.radius_t0 > 0.0, "radius.t0 must be positive");
  if (!doc["radius"]["noise_floor"].is_null()) {
    cfg.noise_floor = read<double>(doc, "radius.noise_floor");
    require(*cfg.noise_floor > 0.0, "radius.noise_floor must be positive");
  }

  cfg.inequality_samples = read<std::size_t>(doc, "inequalities.samples");
  require(cfg.inequality_samples >= 1, "inequalities.samples must be >= 1");
  cfg.thetas = read_list(doc, "inequalities.thetas");
  for (double theta : cfg.thetas) {
    require(theta >= 0.0 && theta <= 1.0, "inequalities.thetas must lie in [0, 1]");
  }
  cfg.max_p = read<int>(doc, "inequalities.max_p");
  require(cfg.max_p >= 1 && cfg.max_p <= 8, "inequalities.max_p must lie in [1, 8]");

  cfg.soliton_speed = read<double>(doc, "soliton.speed");
  cfg.soliton_x0 = read<double>(doc, "soliton.x0");
  require(cfg.soliton_speed > 0.0, "soliton.speed must be positive");

  auto& st = cfg.strichartz;
  st.t_blk = read<double>(doc, "strichartz.t_blk");
  st.widths = read_list(doc, "strichartz.widths");
  st.amplitudes = read_list(doc, "strichartz.amplitudes");
  st.refine = read<bool>(doc, "strichartz.refine");
  st.options.b = read<double>(doc, "strichartz.b");
  st.options.s_maximal = read<double>(doc, "strichartz.s_maximal");
  st.options.window = time_window_from_string(read<std::string>(doc, "strichartz.window"));
  st.options.time_samples = read<Index>(doc, "strichartz.time_samples");
  require(st.t_blk > 0.0, "strichartz.t_blk must be positive");
  require(!st.widths.empty() && !st.amplitudes.empty(),
          "strichartz.widths and strichartz.amplitudes must be non-empty");
  for (double w : st.widths) require(w > 0.0, "strichartz.widths must be positive");
  for (double a : st.amplitudes) {
    require(std::isfinite(a) && a != 0.0, "strichartz.amplitudes must be nonzero");
  }
  require(st.options.b > 0.5 && st.options.b < 1.0, "strichartz.b must lie in (1/2, 1)");
  require(st.options.s_maximal > 0.75, "strichartz.s_maximal must exceed 3/4");
  require(st.options.time_samples >= 0 && st.options.time_samples % 2 == 0,
          "strichartz.time_samples must be 0 or a positive even number");

  // scenario-specific requirements
  switch (scenario) {
    case Scenario::Conservation: {
      require(cfg.sigmas.size() == 1, "conservation takes exactly one gevrey.sigma");
      const double intervals = cfg.solver.t_final / cfg.sample_dt;
      require(std::abs(intervals - std::round(intervals)) <= 1e-9 * intervals,
              "sampling.dt must divide solver.t_final");
      require(std::round(intervals) >= 2, "conservation needs at least two sampling intervals");
      break;
    }
    case Scenario::SigmaScaling: {
      std::vector<double> sorted = cfg.sigmas;
      std::sort(sorted.begin(), sorted.end());
      require(sorted.size() >= 2 && sorted.front() > 0.0 &&
                  std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
              "sigma-scaling needs at least two distinct positive gevrey.sigma values");
      break;
    }
    case Scenario::RadiusTrack:
      require(4.0 * cfg.radius_t0 <= cfg.solver.t_final,
              "radius-track needs 4 * radius.t0 <= solver.t_final");
      break;
    case Scenario::SolitonValidate:
      require(cfg.solver.mu == 1.0, "soliton-validate needs the focusing equation (solver.mu = 1)");
      {
        const double tail = std::sqrt(6.0 * cfg.soliton_speed) /
                            std::cosh(std::sqrt(cfg.soliton_speed) * cfg.half_length);
        require(tail <= kBoundaryTolerance * std::sqrt(6.0 * cfg.soliton_speed),
                "soliton tail has not decayed at x = -L; enlarge grid.L");
      }
      break;
    case Scenario::Inequalities:
    case Scenario::Strichartz:
      break;
  }
  if (scenario == Scenario::Strichartz) {
    for (double w : st.widths) {
      InitialData g{Preset::Gaussian, 1.0, w};
      make_initial(grid, g);
      if (st.refine) make_initial(GridD(cfg.n * 2, cfg.half_length), g);
    }
  }
  if (uses_initial_data(scenario)) make_initial(grid, cfg.u0);

  // The sigma gate comes last so the message carries the bound for this grid.
  if (scenario == Scenario::Conservation || scenario == Scenario::SigmaScaling) {
    for (double sigma : cfg.sigmas) require_sigma_gate(grid, sigma);
  }

  cfg.canonical = doc;
  cfg.canonical.erase("out_dir");
  return cfg;
}

std::uint64_t config_hash(const json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash_hex(const json& canonical) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(canonical)));
  return buf;
}

int resolve_threads(std::optional<int> flag) {
  if (flag) {
    if (*flag < 1) throw InvalidInput("--threads must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("GEVREY_MKDV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    throw InvalidInput(std::string("GEVREY_MKDV_THREADS='") + env +
                       "' is not a positive integer");
  }
  return 1;
}

// ---------------------------------------------------------------------------
// output helpers

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& hash,
            const std::vector<std::string>& header)
      : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    out_ << "# config_hash=" << hash << "\r\n";
    row(header);
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(fields[i]);
    }
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y) {
  const double count = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

double relative_drift(const std::vector<double>& series) {
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - series.front()));
  const double scale = std::abs(series.front());
  return scale > 0.0 ? worst / scale : worst;
}

struct RunContext {
  const ExperimentConfig& cfg;
  int threads;
  std::string hash;
  fs::path dir;
  json summary;
};

// ---------------------------------------------------------------------------
// scenarios

int run_conservation(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const GridD grid = cfg.grid();
  const double sigma = cfg.sigmas.front();
  const State initial{make_initial(grid, cfg.u0), 0.0};

  std::vector<EnergyLedger> ledgers;
  std::vector<RadiusEstimate> radii;
  const Observer record = [&](const State& s) {
    ledgers.push_back(modified_energy(s.field, sigma, cfg.solver.mu, WeightKind::Cosh, s.t));
    radii.push_back(estimate_radius(s.field, cfg.noise_floor));
  };

  IdentityCheck check;
  if (cfg.halving) {
    check = track_identity(initial, cfg.solver, sigma, cfg.sample_dt, record);
  } else {
    check.trace = trace_identity(initial, cfg.solver, sigma, cfg.sample_dt, record);
    check.trusted = true;
  }
  const RemainderTrace& trace = check.trace;

  CsvWriter csv(ctx.dir / "conservation.csv", ctx.hash,
                {"t", "mass", "h1_energy", "i2_at_zero", "a_sigma", "r_accum",
                 "identity_residual", "sigma_hat", "trusted"});
  std::vector<double> mass, h1, i2, i0w, i1w, i2w;
  for (std::size_t i = 0; i < ledgers.size(); ++i) {
    const auto& e = ledgers[i];
    csv.row({fmt(trace.times[i]), fmt(e.mass), fmt(e.h1_energy), fmt(e.i2_at_zero),
             fmt(e.a_sigma), fmt(trace.r_accum[i]), fmt(trace.identity_residual[i]),
             fmt(radii[i].sigma_hat), radii[i].trusted ? "true" : "false"});
    mass.push_back(e.mass);
    h1.push_back(e.h1_energy);
    i2.push_back(e.i2_at_zero);
    i0w.push_back(e.i0);
    i1w.push_back(e.i1);
    i2w.push_back(e.i2);
  }

  constexpr double kDriftTolerance = 1e-8;
  json drift = {{"mass", relative_drift(mass)},
                {"h1_energy", relative_drift(h1)},
                {"i2_at_zero", relative_drift(i2)}};
  json exceeding = json::array();
  for (auto it = drift.begin(); it != drift.end(); ++it) {
    if (it->get<double>() > kDriftTolerance) exceeding.push_back(it.key());
  }
  auto& s = ctx.summary;
  s["sigma"] = sigma;
  s["samples"] = ledgers.size();
  s["relative_drift"] = drift;
  s["drift_tolerance"] = kDriftTolerance;
  s["levels_exceeding_tolerance"] = exceeding;
  s["weighted_level_relative_drift"] = {{"i0", relative_drift(i0w)},
                                        {"i1", relative_drift(i1w)},
                                        {"i2", relative_drift(i2w)}};
  s["identity"] = {{"max_abs_residual", trace.max_abs_residual()},
                   {"max_abs_defect", trace.max_abs_defect()},
                   {"a_sigma_initial", trace.a_sigma.front()},
                   {"halving", cfg.halving},
                   {"trusted", check.trusted}};
  if (cfg.halving) {
    s["identity"]["refined_max_abs_residual"] = check.refined.max_abs_residual();
    s["identity"]["halving_ratio"] = finite_or_null(check.halving_ratio);
  }
  if (!check.trusted) {
    std::ostringstream msg;
    msg << "energy identity residual failed the halving test (ratio "
        << check.halving_ratio << " < 8)";
    throw UntrustedResult(msg.str());
  }
  return kExitOk;
}

int run_sigma_scaling(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const GridD grid = cfg.grid();
  std::vector<double> sigmas = cfg.sigmas;
  std::sort(sigmas.begin(), sigmas.end());

  std::vector<Field> states;
  const Observer keep = [&](const State& s) { states.push_back(s.field); };
  const auto times = uniform_times(0.0, cfg.solver.t_final, cfg.sample_dt);
  evolve(State{make_initial(grid, cfg.u0), 0.0}, cfg.solver, times,
         std::span<const Observer>(&keep, 1));

  struct Row {
    double a0 = 0, max_delta_a = 0, contrast0 = 0, max_delta_contrast = 0;
  };
  std::vector<Row> rows(sigmas.size());
  parallel_for(sigmas.size(), ctx.threads, [&](std::size_t i) {
    Row r;
    for (std::size_t j = 0; j < states.size(); ++j) {
      const double a = modified_energy(states[j], sigmas[i], cfg.solver.mu).a_sigma;
      const double e = h1_level_energy(states[j], sigmas[i], cfg.solver.mu, WeightKind::Exp);
      if (j == 0) {
        r.a0 = a;
        r.contrast0 = e;
      }
      r.max_delta_a = std::max(r.max_delta_a, std::abs(a - r.a0));
      r.max_delta_contrast = std::max(r.max_delta_contrast, std::abs(e - r.contrast0));
    }
    rows[i] = r;
  });

  CsvWriter csv(ctx.dir / "sigma_scaling.csv", ctx.hash,
                {"sigma", "a_sigma_initial", "max_delta_a_sigma",
                 "contrast_initial", "max_delta_contrast"});
  std::vector<double> da, dc;
  json table = json::array();
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const Row& r = rows[i];
    csv.row({fmt(sigmas[i]), fmt(r.a0), fmt(r.max_delta_a), fmt(r.contrast0),
             fmt(r.max_delta_contrast)});
    table.push_back({{"sigma", sigmas[i]},
                     {"a_sigma_initial", r.a0},
                     {"max_delta_a_sigma", r.max_delta_a},
                     {"contrast_initial", r.contrast0},
                     {"max_delta_contrast", r.max_delta_contrast}});
    da.push_back(r.max_delta_a);
    dc.push_back(r.max_delta_contrast);
  }
  const bool positive = std::all_of(da.begin(), da.end(), [](double v) { return v > 0; }) &&
                        std::all_of(dc.begin(), dc.end(), [](double v) { return v > 0; });
  if (!positive) {
    throw UntrustedResult("a defect vanished exactly; the exponent fit is undefined");
  }
  auto& s = ctx.summary;
  s["horizon"] = cfg.solver.t_final;
  s["table"] = table;
  s["fitted_exponent"] = log_log_slope(sigmas, da);
  s["contrast_weight"] = "exp";
  s["contrast_functional"] = "I0 + I1";
  s["contrast_exponent"] = log_log_slope(sigmas, dc);
  return kExitOk;
}

int run_radius_track(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const GridD grid = cfg.grid();
  const double t_fit = 4.0 * cfg.radius_t0;

  auto times = uniform_times(0.0, cfg.solver.t_final, cfg.sample_dt);
  times.push_back(t_fit);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
              times.end());

  std::vector<double> sample_t;
  std::vector<RadiusEstimate> est;
  const Observer record = [&](const State& s) {
    sample_t.push_back(s.t);
    est.push_back(estimate_radius(s.field, cfg.noise_floor));
  };
  evolve(State{make_initial(grid, cfg.u0), 0.0}, cfg.solver, times,
         std::span<const Observer>(&record, 1));

  std::size_t fit_index = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample_t.size(); ++i) {
    if (std::abs(sample_t[i] - t_fit) < best) {
      best = std::abs(sample_t[i] - t_fit);
      fit_index = i;
    }
  }
  const double sigma0 = est.front().sigma_hat;
  const double c = est[fit_index].sigma_hat * std::sqrt(sample_t[fit_index]);

  CsvWriter csv(ctx.dir / "radius_track.csv", ctx.hash,
                {"t", "sigma_hat", "trusted", "reference", "xi_lo", "xi_hi",
                 "residual", "modes", "violation"});
  std::size_t trusted = 0, violations = 0, late_violations = 0;
  json first_violation = nullptr;
  for (std::size_t i = 0; i < sample_t.size(); ++i) {
    const double t = sample_t[i];
    const double reference = t > 0.0 ? std::min(sigma0, c / std::sqrt(t)) : sigma0;
    const bool violated = est[i].trusted && est[i].sigma_hat < reference;
    if (est[i].trusted) ++trusted;
    if (violated) {
      ++violations;
      if (t >= sample_t[fit_index]) ++late_violations;
      if (first_violation.is_null()) first_violation = t;
    }
    csv.row({fmt(t), fmt(est[i].sigma_hat), est[i].trusted ? "true" : "false",
             fmt(reference), fmt(est[i].xi_lo), fmt(est[i].xi_hi),
             fmt(est[i].residual), std::to_string(est[i].modes),
             violated ? "true" : "false"});
  }

  auto& s = ctx.summary;
  s["sigma0_nominal"] = finite_or_null(nominal_radius(cfg.u0));
  s["sigma0_measured"] = sigma0;
  s["t0"] = cfg.radius_t0;
  s["t_fit"] = sample_t[fit_index];
  s["sigma_hat_at_fit"] = est[fit_index].sigma_hat;
  s["c"] = c;
  s["samples"] = sample_t.size();
  s["trusted_samples"] = trusted;
  s["violations"] = violations;
  s["violations_after_fit"] = late_violations;
  s["first_violation_time"] = first_violation;
  s["bound_holds"] = violations == 0;
  s["final_sigma_hat"] = est.back().sigma_hat;
  if (!est.front().trusted || !est[fit_index].trusted) {
    throw UntrustedResult("radius estimate at t = 0 or at the fitting time is untrusted");
  }
  return kExitOk;
}

int run_inequalities(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  struct Check {
    Inequality which;
    double parameter;  // theta, or p for the lemma
  };
  std::vector<Check> checks;
  for (double theta : cfg.thetas) checks.push_back({Inequality::ExpEst, theta});
  for (double theta : cfg.thetas) checks.push_back({Inequality::Cosh1, theta});
  checks.push_back({Inequality::Equivalence, 0.0});
  for (int p = 1; p <= cfg.max_p; ++p) {
    checks.push_back({Inequality::CoshLemma, static_cast<double>(p)});
  }

  std::vector<MarginReport> reports(checks.size());
  parallel_for(checks.size(), ctx.threads, [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    const Check& c = checks[i];
    if (c.which == Inequality::CoshLemma) {
      const auto tuples = sample_lemma_tuples(cfg.inequality_samples,
                                              static_cast<int>(c.parameter), rng);
      reports[i] = inequality_margin(tuples);
    } else {
      const auto samples = sample_weight_inequality(cfg.inequality_samples, c.parameter, rng);
      reports[i] = inequality_margin(c.which, samples);
    }
  });

  CsvWriter csv(ctx.dir / "inequalities.csv", ctx.hash,
                {"inequality", "parameter", "count", "worst_margin", "holds", "argmax"});
  json list = json::array();
  bool all_hold = true;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const MarginReport& r = reports[i];
    std::string argmax;
    for (std::size_t k = 0; k < r.argmax.size(); ++k) {
      argmax += (k ? ";" : "") + fmt(r.argmax[k]);
    }
    const char* parameter_name = checks[i].which == Inequality::CoshLemma ? "p" : "theta";
    csv.row({to_string(r.which), fmt(checks[i].parameter), std::to_string(r.count),
             fmt(r.worst_margin), r.holds() ? "true" : "false", argmax});
    list.push_back({{"inequality", to_string(r.which)},
                    {parameter_name, checks[i].parameter},
                    {"count", r.count},
                    {"worst_margin", r.worst_margin},
                    {"argmax", r.argmax},
                    {"holds", r.holds()}});
    all_hold = all_hold && r.holds();
  }
  ctx.summary["reports"] = list;
  ctx.summary["all_hold"] = all_hold;
  write_json(ctx.dir / "inequalities.json", {{"config_hash", ctx.hash}, {"reports", list}});
  return kExitOk;
}

int run_soliton(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const GridD grid = cfg.grid();
  const double c = cfg.soliton_speed;
  const Field u0 = soliton(grid, c, cfg.soliton_x0, 0.0);
  const double mass0 = integrate_product(u0, u0);

  CsvWriter csv(ctx.dir / "soliton.csv", ctx.hash,
                {"t", "linf_error", "l2_error", "mass_relative_drift"});
  double max_linf = 0.0, final_linf = 0.0, final_l2 = 0.0;
  const Observer record = [&](const State& s) {
    const Eigen::ArrayXd diff =
        inverse(s.field) - inverse(soliton(grid, c, cfg.soliton_x0, s.t));
    const double linf = diff.abs().maxCoeff();
    const double l2 = std::sqrt(diff.square().sum() * grid.dx());
    const double drift = std::abs(integrate_product(s.field, s.field) / mass0 - 1.0);
    csv.row({fmt(s.t), fmt(linf), fmt(l2), fmt(drift)});
    max_linf = std::max(max_linf, linf);
    final_linf = linf;
    final_l2 = l2;
  };
  const auto times = uniform_times(0.0, cfg.solver.t_final, cfg.sample_dt);
  evolve(State{u0, 0.0}, cfg.solver, times, std::span<const Observer>(&record, 1));

  auto& s = ctx.summary;
  s["speed"] = c;
  s["amplitude"] = std::sqrt(6.0 * c);
  s["profile"] = "sqrt(6c) sech(sqrt(c) (x - x0 - c t))";
  s["final_linf_error"] = final_linf;
  s["final_l2_error"] = final_l2;
  s["max_linf_error"] = max_linf;
  return kExitOk;
}

int run_strichartz(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& sweep = cfg.strichartz;
  std::vector<Index> sizes{cfg.n};
  if (sweep.refine) sizes.push_back(2 * cfg.n);
  const std::vector<StrichartzKind> kinds{StrichartzKind::L6, StrichartzKind::L8,
                                          StrichartzKind::Maximal,
                                          StrichartzKind::Smoothing};
  std::vector<double> widths = sweep.widths;
  std::vector<double> amps = sweep.amplitudes;
  std::sort(widths.begin(), widths.end());
  std::sort(amps.begin(), amps.end());

  struct Case {
    StrichartzKind kind;
    double width;
    double amp;
    Index n;
    StrichartzResult result;
  };
  std::vector<Case> cases;
  for (auto kind : kinds)
    for (Index n : sizes)
      for (double w : widths)
        for (double a : amps) cases.push_back({kind, w, a, n, {}});

  parallel_for(cases.size(), ctx.threads, [&](std::size_t i) {
    Case& c = cases[i];
    const GridD grid(c.n, cfg.half_length);
    const Field data = make_initial(grid, {Preset::Gaussian, c.amp, c.width});
    c.result = strichartz_ratio(c.kind, data, sweep.t_blk, sweep.options);
  });

  CsvWriter csv(ctx.dir / "strichartz.csv", ctx.hash,
                {"kind", "n", "width", "amp", "time_samples", "lhs", "rhs", "ratio"});
  for (const Case& c : cases) {
    csv.row({to_string(c.kind), std::to_string(c.n), fmt(c.width), fmt(c.amp),
             std::to_string(c.result.time_samples), fmt(c.result.lhs),
             fmt(c.result.rhs), fmt(c.result.ratio)});
  }

  json per_kind = json::object();
  for (auto kind : kinds) {
    json entry;
    double spread = 0.0;
    json max_by_n = json::object();
    std::vector<double> maxima;
    for (Index n : sizes) {
      double best = 0.0;
      for (double w : widths) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const Case& c : cases) {
          if (c.kind != kind || c.n != n || c.width != w) continue;
          lo = std::min(lo, c.result.ratio);
          hi = std::max(hi, c.result.ratio);
        }
        best = std::max(best, hi);
        if (hi > 0.0) spread = std::max(spread, (hi - lo) / hi);
      }
      max_by_n[std::to_string(n)] = best;
      maxima.push_back(best);
    }
    entry["max_ratio_by_n"] = max_by_n;
    entry["amplitude_spread"] = spread;
    if (maxima.size() == 2) entry["refinement_growth"] = maxima[1] / maxima[0] - 1.0;
    per_kind[to_string(kind)] = entry;
  }
  auto& s = ctx.summary;
  s["t_blk"] = sweep.t_blk;
  s["b"] = sweep.options.b;
  s["s_maximal"] = sweep.options.s_maximal;
  s["window"] = to_string(sweep.options.window);
  s["kinds"] = per_kind;
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------
// orchestration

void write_error_record(const fs::path& out_dir, int exit_code,
                        const std::string& kind, const std::string& message) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  write_json(out_dir / "error.json",
             {{"exit_code", exit_code}, {"error", kind}, {"message", message}});
}

int run(const ExperimentConfig& cfg, int threads) {
  RunContext ctx{cfg, threads, config_hash_hex(cfg.canonical), cfg.out_dir, json::object()};
  fs::create_directories(ctx.dir);
  fs::remove(ctx.dir / "error.json");
  write_json(ctx.dir / "config.json", cfg.canonical);
  ctx.summary["scenario"] = to_string(cfg.scenario);
  ctx.summary["config_hash"] = ctx.hash;
  ctx.summary["seed"] = cfg.seed;

  auto fail = [&](int code, const std::string& kind, const std::string& message,
                  json extra = json::object()) {
    json record = {{"exit_code", code},
                   {"error", kind},
                   {"message", message},
                   {"config_hash", ctx.hash}};
    merge_into(record, extra);
    write_json(ctx.dir / "error.json", record);
    ctx.summary["status"] = kind;
    write_json(ctx.dir / "summary.json", ctx.summary);
    return code;
  };

  int code = kExitOk;
  try {
    switch (cfg.scenario) {
      case Scenario::Conservation: code = run_conservation(ctx); break;
      case Scenario::SigmaScaling: code = run_sigma_scaling(ctx); break;
      case Scenario::RadiusTrack: code = run_radius_track(ctx); break;
      case Scenario::Inequalities: code = run_inequalities(ctx); break;
      case Scenario::SolitonValidate: code = run_soliton(ctx); break;
      case Scenario::Strichartz: code = run_strichartz(ctx); break;
    }
  } catch (const CflError& e) {
    const bool at_launch = e.time() == 0.0;
    return fail(at_launch ? kExitInvalidConfig : kExitBlowUp, "cfl", e.what(),
                {{"time", e.time()}});
  } catch (const BlowUpError& e) {
    return fail(kExitBlowUp, "blow_up", e.what(), {{"time", e.time()}});
  } catch (const OverflowError& e) {
    return fail(kExitUntrusted, "sigma_gate", e.what());
  } catch (const UntrustedResult& e) {
    return fail(kExitUntrusted, "untrusted", e.what());
  } catch (const InvalidInput& e) {
    return fail(kExitInvalidConfig, "invalid_config", e.what());
  }
  ctx.summary["status"] = "ok";
  write_json(ctx.dir / "summary.json", ctx.summary);
  return code;
}

}  // namespace gmkdv
