#include "gevrey_mkdv/mkdv_solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace gmkdv {

namespace {

using Complex = std::complex<double>;
using CoeffArray = Field::CoeffArray;

/// exp(i xi^3 t) for every stored mode; 1 at the Nyquist mode.
CoeffArray airy_factors(const GridD& grid, double t) {
  const Index n = grid.size();
  CoeffArray e(n);
  for (Index m = 0; m < n; ++m) {
    const double xi = grid.xi(m);
    e[m] = std::polar(1.0, xi * xi * xi * t);
  }
  e[grid.nyquist_index()] = Complex(1.0, 0.0);
  return e;
}

Field make_field(const GridD& grid, CoeffArray coeffs, bool real) {
  return Field(grid, std::move(coeffs), real);
}

bool all_finite(const CoeffArray& c) {
  return c.real().isFinite().all() && c.imag().isFinite().all();
}

}  // namespace

void validate(const SolverConfig& cfg) {
  if (!(cfg.mu == -1.0 || cfg.mu == 0.0 || cfg.mu == 1.0)) {
    throw InvalidInput("solver.mu must be -1, 0 or 1");
  }
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw InvalidInput("solver.dt must be positive");
  }
  if (!(cfg.t_final > 0.0) || !std::isfinite(cfg.t_final)) {
    throw InvalidInput("solver.t_final must be positive");
  }
  if (cfg.dealias < 2) throw InvalidInput("solver.dealias must be >= 2");
}

Field airy_propagate(const Field& f, double t) {
  CoeffArray out = f.coeffs() * airy_factors(f.grid(), t);
  return make_field(f.grid(), std::move(out), f.is_real());
}

Field nonlinear_term(const Field& u, double mu, int dealias) {
  if (mu == 0.0) return Field(u.grid());
  const Field cube = dealiased_cube(u, dealias);
  const auto& grid = u.grid();
  CoeffArray out(grid.size());
  for (Index m = 0; m < grid.size(); ++m) {
    out[m] = Complex(0.0, -mu / 3.0 * grid.xi(m)) * cube.coeffs()[m];
  }
  out[grid.nyquist_index()] = Complex(0.0, 0.0);
  return make_field(grid, std::move(out), u.is_real());
}

State step(const State& state, const SolverConfig& cfg) {
  return step(state, cfg, cfg.dt);
}

State step(const State& state, const SolverConfig& cfg, double dt) {
  const auto& grid = state.field.grid();
  const bool real = state.field.is_real();
  const CoeffArray& u = state.field.coeffs();
  const CoeffArray e_half = airy_factors(grid, 0.5 * dt);
  const CoeffArray e_full = e_half * e_half;

  const double t_next = state.t + dt;
  if (cfg.mu == 0.0) return State{make_field(grid, u * e_full, real), t_next};

  auto blow_up = [&] {
    std::ostringstream msg;
    msg << "solution blew up (non-finite coefficients) at t = " << t_next;
    return BlowUpError(msg.str(), t_next);
  };
  // A non-finite stage surfaces either here or as a failed realness check
  // inside the padded cube.
  auto rhs = [&](const CoeffArray& c) {
    if (!all_finite(c)) throw blow_up();
    try {
      return CoeffArray(
          nonlinear_term(make_field(grid, c, real), cfg.mu, cfg.dealias)
              .coeffs());
    } catch (const RealnessError&) {
      throw blow_up();
    }
  };
  const CoeffArray a = rhs(u);
  const CoeffArray b = rhs(e_half * (u + (0.5 * dt) * a));
  const CoeffArray c = rhs(e_half * u + (0.5 * dt) * b);
  const CoeffArray d = rhs(e_full * u + dt * (e_half * c));
  CoeffArray out =
      e_full * u +
      (dt / 6.0) * (e_full * a + 2.0 * e_half * (b + c) + d);

  if (!all_finite(out)) throw blow_up();
  return State{make_field(grid, std::move(out), real), t_next};
}

double cfl_limit(const Field& u) {
  const double umax = inverse_complex(u).abs().maxCoeff();
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * u.grid().dx() / (umax * umax);
}

void check_cfl(const State& state, const SolverConfig& cfg) {
  if (cfg.mu == 0.0) return;
  const double limit = cfl_limit(state.field);
  if (cfg.dt > limit) {
    std::ostringstream msg;
    msg << "nonlinear CFL violated at t = " << state.t << ": dt = " << cfg.dt
        << " > 0.5 dx / max|u|^2 = " << limit;
    throw CflError(msg.str(), state.t);
  }
}

State evolve(const State& state, const SolverConfig& cfg,
             std::span<const double> sample_times,
             std::span<const Observer> observers) {
  validate(cfg);
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    const double ts = sample_times[i];
    if (ts < state.t - 1e-12 || ts > cfg.t_final + 1e-12 ||
        (i > 0 && ts < sample_times[i - 1])) {
      throw InvalidInput("sample times must be sorted and lie in [t, t_final]");
    }
  }
  check_cfl(state, cfg);

  State cur = state;
  std::size_t steps_taken = 0;
  auto advance_to = [&](double target) {
    const double span = target - cur.t;
    if (span <= 1e-14 * std::max(1.0, std::abs(target))) return;
    const auto count =
        static_cast<long>(std::ceil(span / cfg.dt - 1e-9));
    const double h = span / static_cast<double>(count);
    for (long i = 0; i < count; ++i) {
      cur = step(cur, cfg, h);
      if (++steps_taken % 100 == 0) check_cfl(cur, cfg);
    }
    cur.t = target;
  };

  for (double ts : sample_times) {
    advance_to(ts);
    for (const auto& obs : observers) obs(cur);
  }
  advance_to(cfg.t_final);
  return cur;
}

std::vector<double> uniform_times(double t0, double t_final, double h) {
  if (!(h > 0.0)) throw InvalidInput("sample interval must be positive");
  std::vector<double> out;
  const auto count =
      static_cast<long>(std::floor((t_final - t0) / h + 1e-9));
  out.reserve(static_cast<std::size_t>(count) + 2);
  for (long i = 0; i <= count; ++i) out.push_back(t0 + static_cast<double>(i) * h);
  if (t_final - out.back() > 1e-9 * h) out.push_back(t_final);
  return out;
}

}  // namespace gmkdv
