#include "gevrey_mkdv/commutator_remainder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gmkdv {

Field commutator_f(const Field& u, double sigma, double mu, int dealias) {
  if (!u.is_real()) throw InvalidInput("commutator_f: field must be real");
  require_sigma_gate(u.grid(), sigma);
  const Field U = apply_weight(u, WeightKind::Cosh, sigma);
  const Field bracket_term =
      dealiased_cube(U, dealias) -
      apply_weight(dealiased_cube(u, dealias), WeightKind::Cosh, sigma);
  return (mu / 3.0) * derivative(bracket_term, 1);
}

RemainderIntegrands remainder_integrands(const Field& u, double sigma,
                                         double mu, int dealias) {
  const Field F = commutator_f(u, sigma, mu, dealias);
  const Field U = apply_weight(u, WeightKind::Cosh, sigma);
  const Field ux = derivative(U, 1);
  const Field uxx = derivative(U, 2);
  const Field fxx = derivative(F, 2);

  RemainderIntegrands r;
  r.r1 = 2.0 * integrate_product(U, F);
  r.r2 = -2.0 * integrate_product(uxx, F) -
         2.0 * mu / 3.0 * integrate_product(U, U, U, F);
  r.r3 = integrate_product(U, U, U, U, U, F) / 3.0 +
         10.0 * mu / 3.0 *
             (integrate_product(U, ux, ux, F) + integrate_product(U, U, uxx, F));
  r.r4 = 2.0 * integrate_product(uxx, fxx);
  return r;
}

std::vector<double> cumulative_simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * h * (f[0] + f[1]);
    return out;
  }
  out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
  for (std::size_t i = 2; i < n; ++i) {
    if (i % 2 == 0) {
      out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    } else {
      out[i] = out[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
    }
  }
  return out;
}

double RemainderTrace::max_abs_residual() const {
  double worst = 0.0;
  for (double v : identity_residual) worst = std::max(worst, std::abs(v));
  return worst;
}

double RemainderTrace::max_abs_defect() const {
  double worst = 0.0;
  for (double v : a_sigma) worst = std::max(worst, std::abs(v - a_sigma.front()));
  return worst;
}

RemainderTrace trace_identity(const State& initial, const SolverConfig& cfg,
                              double sigma, double sample_dt,
                              const Observer& on_sample) {
  const double span = cfg.t_final - initial.t;
  const double intervals = span / sample_dt;
  if (!(sample_dt > 0.0) ||
      std::abs(intervals - std::round(intervals)) > 1e-9 * intervals) {
    std::ostringstream msg;
    msg << "sample_dt = " << sample_dt << " must divide the horizon " << span;
    throw InvalidInput(msg.str());
  }
  require_sigma_gate(initial.field.grid(), sigma);

  RemainderTrace trace;
  trace.sigma = sigma;
  trace.dt = cfg.dt;
  trace.sample_dt = sample_dt;
  const auto count = static_cast<std::size_t>(std::round(intervals));
  std::vector<double> times(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    times[i] = initial.t + static_cast<double>(i) * sample_dt;
  }
  times.back() = cfg.t_final;

  const Observer record = [&](const State& s) {
    const RemainderIntegrands r = remainder_integrands(s.field, sigma, cfg.mu,
                                                       cfg.dealias);
    trace.times.push_back(s.t);
    trace.r1.push_back(r.r1);
    trace.r2.push_back(r.r2);
    trace.r3.push_back(r.r3);
    trace.r4.push_back(r.r4);
    trace.a_sigma.push_back(modified_energy(s.field, sigma, cfg.mu).a_sigma);
    if (on_sample) on_sample(s);
  };
  evolve(initial, cfg, times, std::span<const Observer>(&record, 1));

  std::vector<double> total(trace.times.size());
  for (std::size_t i = 0; i < total.size(); ++i) {
    total[i] = trace.r1[i] + trace.r2[i] + trace.r3[i] + trace.r4[i];
  }
  trace.r_accum = cumulative_simpson(total, sample_dt);
  trace.identity_residual.resize(total.size());
  for (std::size_t i = 0; i < total.size(); ++i) {
    trace.identity_residual[i] =
        trace.a_sigma[i] - trace.a_sigma.front() - trace.r_accum[i];
  }
  return trace;
}

IdentityCheck track_identity(const State& initial, const SolverConfig& cfg,
                             double sigma, double sample_dt,
                             const Observer& on_sample) {
  IdentityCheck check;
  check.trace = trace_identity(initial, cfg, sigma, sample_dt, on_sample);
  SolverConfig fine = cfg;
  fine.dt = 0.5 * cfg.dt;
  check.refined = trace_identity(initial, fine, sigma, 0.5 * sample_dt);

  const double coarse = check.trace.max_abs_residual();
  const double refined = check.refined.max_abs_residual();
  check.halving_ratio = refined > 0.0 ? coarse / refined
                                      : std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, std::abs(check.trace.a_sigma.front()));
  check.trusted = check.halving_ratio >= 8.0 ||
                  coarse <= kIdentityResidualFloor * scale;
  return check;
}

double weighted_pde_residual(std::span<const Field, 5> w, double h,
                             double sigma, double mu, int dealias) {
  std::array<Field, 5> U{apply_weight(w[0], WeightKind::Cosh, sigma),
                         apply_weight(w[1], WeightKind::Cosh, sigma),
                         apply_weight(w[2], WeightKind::Cosh, sigma),
                         apply_weight(w[3], WeightKind::Cosh, sigma),
                         apply_weight(w[4], WeightKind::Cosh, sigma)};
  const Field ut =
      (1.0 / (12.0 * h)) * (U[0] - U[4] + 8.0 * (U[3] - U[1]));
  const Field& Uc = U[2];
  const Field nonlinear =
      (mu / 3.0) * derivative(dealiased_cube(Uc, dealias), 1);
  const Field residual = ut + derivative(Uc, 3) + nonlinear -
                         commutator_f(w[2], sigma, mu, dealias);
  return std::sqrt(Uc.grid().length() * residual.coeffs().abs2().sum());
}

}  // namespace gmkdv
