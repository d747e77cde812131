#pragma once

#include <functional>
#include <span>
#include <string>

#include "gevrey_mkdv/spectral_core.hpp"

namespace gmkdv {

enum class Scheme { IFRK4 };

/// Settings for u_t + u_xxx + mu u^2 u_x = 0.
struct SolverConfig {
  double mu = -1.0;  // +1 focusing, -1 defocusing, 0 linear (Airy)
  double dt = 1e-3;
  double t_final = 1.0;
  Scheme scheme = Scheme::IFRK4;
  int dealias = 2;  // zero-padding factor for the cubic term
};

/// Validates mu in {-1, 0, 1}, dt > 0, t_final > 0 and dealias >= 2.
void validate(const SolverConfig& cfg);

struct State {
  Field field;
  double t = 0.0;
};

/// Exact linear group: coefficient at xi multiplied by exp(i xi^3 t). The
/// Nyquist mode is left untouched, matching the zeroed odd derivative there.
Field airy_propagate(const Field& f, double t);

/// Right-hand side of the nonlinear part in Fourier space,
/// -(mu/3) (i xi) FFT[u^3], dealiased.
Field nonlinear_term(const Field& u, double mu, int dealias = 2);

/// One integrating-factor RK4 step of size cfg.dt. Throws BlowUpError when a
/// coefficient becomes NaN/Inf.
State step(const State& state, const SolverConfig& cfg);
/// Same with an explicit step size.
State step(const State& state, const SolverConfig& cfg, double dt);

/// Largest admissible step for the nonlinear bound dt <= 0.5 dx / max|u|^2.
double cfl_limit(const Field& u);
/// Throws CflError when cfg.dt violates the bound for `state`.
void check_cfl(const State& state, const SolverConfig& cfg);

using Observer = std::function<void(const State&)>;

/// Steps from state.t to cfg.t_final. Every observer is invoked at each of
/// `sample_times` (which must lie in [state.t, cfg.t_final] and be sorted);
/// the step is shortened where needed to land on them exactly. The CFL bound
/// is checked at launch and every 100 steps.
State evolve(const State& state, const SolverConfig& cfg,
             std::span<const double> sample_times = {},
             std::span<const Observer> observers = {});

/// Uniform sample times t0, t0 + h, ..., up to and including t_final.
std::vector<double> uniform_times(double t0, double t_final, double h);

}  // namespace gmkdv
