#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gevrey_mkdv/spectral_core.hpp"

namespace gmkdv {

enum class WeightKind { Exp, Cosh, Sech };

std::string to_string(WeightKind kind);
WeightKind weight_kind_from_string(const std::string& name);

/// Largest sigma*|xi| for which exp/cosh stay finite in double precision.
inline constexpr double kMaxWeightExponent = 700.0;

/// Parameters of a weighted Sobolev norm: the radius sigma, the Sobolev index
/// s and the weight (Cosh gives the modified norm, Exp the classical Gevrey
/// norm).
struct GevreyParams {
  double sigma = 0.0;
  double s = 0.0;
  WeightKind kind = WeightKind::Cosh;
};

/// <xi> = 1 + |xi|.
inline double bracket(double xi) { return 1.0 + std::abs(xi); }

/// exp(sigma|xi|), cosh(sigma|xi|) or sech(sigma|xi|).
///
/// cosh is evaluated as (e^a + e^-a)/2 from the same exponential used for the
/// Exp weight, so the ordering e^a/2 <= cosh a <= e^a also holds in floating
/// point. Throws OverflowError when sigma|xi| > 700 for Exp and Cosh.
double weight_value(WeightKind kind, double sigma, double xi);

/// Multiplies every coefficient by w(sigma|xi_k|). Sech is the exact inverse
/// of Cosh.
Field apply_weight(const Field& f, WeightKind kind, double sigma);
inline Field apply_weight(const Field& f, const GevreyParams& params) {
  return apply_weight(f, params.kind, params.sigma);
}

/// (2L sum_k <xi_k>^{2s} w(sigma|xi_k|)^2 |u_k|^2)^{1/2}.
double gevrey_norm(const Field& f, const GevreyParams& params);

/// Largest sigma with cosh(sigma xi_max) * floor < 1e-2: beyond it weighted
/// round-off is no longer small against an O(1) solution.
double safe_sigma_max(const GridD& grid, double floor = 1e-14);

/// Throws OverflowError naming the bound when sigma exceeds safe_sigma_max.
void require_sigma_gate(const GridD& grid, double sigma, double floor = 1e-14);

// --- pointwise weight inequalities ------------------------------------------

enum class Inequality {
  ExpEst,       // e^a - 1 <= a^theta e^a
  Cosh1,        // cosh a - 1 <= a^{2 theta} cosh a
  Equivalence,  // e^a / 2 <= cosh a <= e^a
  CoshLemma,    // |1 - cosh|xi| prod sech|xi_j|| <= 2^p sum_{j!=k} |xi_j||xi_k|
};

std::string to_string(Inequality which);

struct WeightSample {
  double sigma = 0.0;
  double xi = 0.0;
  double theta = 1.0;
};

/// One tuple (xi_1, ..., xi_p), 1 <= p <= 4; xi is their sum.
struct LemmaSample {
  std::vector<double> xis;
};

struct MarginReport {
  Inequality which = Inequality::ExpEst;
  std::size_t count = 0;
  /// max over samples of LHS - RHS; the inequality holds when <= 0.
  double worst_margin = 0.0;
  /// Parameters of the worst sample: (sigma, xi, theta) or the xi tuple.
  std::vector<double> argmax;
  bool holds() const { return worst_margin <= 0.0; }
};

/// LHS - RHS for a single scalar sample.
double inequality_lhs_minus_rhs(Inequality which, const WeightSample& sample);
double cosh_lemma_lhs(std::span<const double> xis);
double cosh_lemma_rhs(std::span<const double> xis);

/// Worst margin of ExpEst, Cosh1 or Equivalence over the samples.
MarginReport inequality_margin(Inequality which,
                               std::span<const WeightSample> samples);
/// Worst margin of the cosh product lemma over the tuples.
MarginReport inequality_margin(std::span<const LemmaSample> samples);

/// Random (sigma, xi) pairs with sigma uniform in [0, sigma_hi] and |xi|
/// log-uniform in [1e-8, xi_hi], random sign; theta is fixed.
std::vector<WeightSample> sample_weight_inequality(std::size_t count,
                                                   double theta,
                                                   std::mt19937_64& rng,
                                                   double sigma_hi = 2.0,
                                                   double xi_hi = 100.0);

/// Random p-tuples with |xi_j| log-uniform in [1e-6, xi_hi], random signs.
std::vector<LemmaSample> sample_lemma_tuples(std::size_t count, int p,
                                             std::mt19937_64& rng,
                                             double xi_hi = 50.0);

// --- radius of analyticity ---------------------------------------------------

/// Decay-rate proxy for the radius of analyticity: sigma_hat is minus the
/// slope of ln|u_k| against |xi_k| over the upper half of the band above the
/// noise floor.
struct RadiusEstimate {
  double sigma_hat = 0.0;
  double xi_lo = 0.0;
  double xi_hi = 0.0;
  double residual = 0.0;
  std::size_t modes = 0;
  bool trusted = false;
};

/// Minimum number of fitted modes for a trusted estimate.
inline constexpr std::size_t kMinRadiusModes = 8;

/// `noise_floor` defaults to 1e-13 max|u_k|.
RadiusEstimate estimate_radius(const Field& f,
                               std::optional<double> noise_floor = {});

}  // namespace gmkdv
