#pragma once

#include <array>
#include <span>
#include <vector>

#include "gevrey_mkdv/energies.hpp"
#include "gevrey_mkdv/mkdv_solver.hpp"

namespace gmkdv {

/// Commutator nonlinearity of the weighted equation
///   U_t + U_xxx + mu U^2 U_x = F(U),   U = cosh(sigma|D|) u,
///   F(U) = (mu/3) d/dx [U^3 - cosh(sigma|D|) (sech(sigma|D|) U)^3].
/// Takes the unweighted u, so sech(sigma|D|) U = u holds exactly.
Field commutator_f(const Field& u, double sigma, double mu, int dealias = 2);

/// The four spatial integrals whose time integrals are R1..R4; their sum is
/// dA_sigma/dt.
struct RemainderIntegrands {
  double r1 = 0.0;  // 2 int U F
  double r2 = 0.0;  // -2 int U_xx F - (2mu/3) int U^3 F
  double r3 = 0.0;  // (1/3) int U^5 F + (10mu/3) int [U U_x^2 + U^2 U_xx] F
  double r4 = 0.0;  // 2 int U_xx (F)_xx
  double sum() const { return r1 + r2 + r3 + r4; }
};

RemainderIntegrands remainder_integrands(const Field& u, double sigma,
                                         double mu, int dealias = 2);

/// Cumulative composite Simpson integral of uniformly spaced samples; the
/// odd-indexed entries close with the three-point rule on the last interval.
std::vector<double> cumulative_simpson(std::span<const double> values,
                                       double h);

/// One evolution with the integrands sampled every sample_dt.
struct RemainderTrace {
  std::vector<double> times;
  std::vector<double> r1, r2, r3, r4;
  std::vector<double> r_accum;
  std::vector<double> a_sigma;
  std::vector<double> identity_residual;  // A(t) - A(0) - R(t)
  double sigma = 0.0;
  double dt = 0.0;
  double sample_dt = 0.0;

  double max_abs_residual() const;
  /// max_t |A(t) - A(0)|
  double max_abs_defect() const;
};

/// `on_sample`, when set, also sees every sampled state.
RemainderTrace trace_identity(const State& initial, const SolverConfig& cfg,
                              double sigma, double sample_dt,
                              const Observer& on_sample = {});

/// Relative floor under which an identity residual counts as round-off.
inline constexpr double kIdentityResidualFloor = 1e-10;

/// trace_identity at (dt, sample_dt) and again at (dt/2, sample_dt/2);
/// `on_sample` is attached to the first run only.
struct IdentityCheck {
  RemainderTrace trace;
  RemainderTrace refined;
  double halving_ratio = 0.0;  // max|residual| coarse / refined
  bool trusted = false;
};

IdentityCheck track_identity(const State& initial, const SolverConfig& cfg,
                             double sigma, double sample_dt,
                             const Observer& on_sample = {});

/// L2 norm of U_t + U_xxx + mu U^2 U_x - F(U) at the centre of five states
/// spaced h apart, with U_t from the fourth-order centred difference.
double weighted_pde_residual(std::span<const Field, 5> window, double h,
                             double sigma, double mu, int dealias = 2);

}  // namespace gmkdv
