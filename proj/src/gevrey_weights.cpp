#include "gevrey_mkdv/gevrey_weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gmkdv {

namespace {

/// ln cosh x without cancellation for small |x| and without overflow.
double log_cosh(double x) {
  const double a = std::abs(x);
  if (a > 20.0) return a - std::log(2.0) + std::log1p(std::exp(-2.0 * a));
  const double sh = std::sinh(0.5 * a);
  return std::log1p(2.0 * sh * sh);
}

}  // namespace

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::Exp: return "exp";
    case WeightKind::Cosh: return "cosh";
    case WeightKind::Sech: return "sech";
  }
  return "unknown";
}

WeightKind weight_kind_from_string(const std::string& name) {
  if (name == "exp") return WeightKind::Exp;
  if (name == "cosh") return WeightKind::Cosh;
  if (name == "sech") return WeightKind::Sech;
  throw InvalidInput("unknown weight kind '" + name + "'");
}

std::string to_string(Inequality which) {
  switch (which) {
    case Inequality::ExpEst: return "exp_est";
    case Inequality::Cosh1: return "cosh_1";
    case Inequality::Equivalence: return "equivalence";
    case Inequality::CoshLemma: return "cosh_lemma";
  }
  return "unknown";
}

double weight_value(WeightKind kind, double sigma, double xi) {
  const double a = sigma * std::abs(xi);
  if (kind == WeightKind::Sech) {
    if (a > kMaxWeightExponent) return 0.0;
    const double ep = std::exp(a);
    return 2.0 / (ep + std::exp(-a));
  }
  if (!(a <= kMaxWeightExponent)) {
    std::ostringstream msg;
    msg << to_string(kind) << " weight overflows: sigma|xi| = " << a
        << " > " << kMaxWeightExponent << " at xi = " << xi;
    throw OverflowError(msg.str(), xi);
  }
  const double ep = std::exp(a);
  if (kind == WeightKind::Exp) return ep;
  return 0.5 * (ep + std::exp(-a));
}

Field apply_weight(const Field& f, WeightKind kind, double sigma) {
  if (!(sigma >= 0.0)) throw InvalidInput("sigma must be >= 0");
  return multiplier(f, [&](double xi) { return weight_value(kind, sigma, xi); });
}

double gevrey_norm(const Field& f, const GevreyParams& params) {
  if (!(params.sigma >= 0.0)) throw InvalidInput("sigma must be >= 0");
  const auto& grid = f.grid();
  double sum = 0.0;
  for (Index m = 0; m < grid.size(); ++m) {
    const double xi = grid.xi(m);
    const double w = weight_value(params.kind, params.sigma, xi);
    sum += std::pow(bracket(xi), 2.0 * params.s) * w * w *
           std::norm(f.coeffs()[m]);
  }
  return std::sqrt(grid.length() * sum);
}

double safe_sigma_max(const GridD& grid, double floor) {
  if (!(floor > 0.0)) throw InvalidInput("safe_sigma_max: floor must be > 0");
  const double target = 1e-2 / floor;
  if (target <= 1.0) return 0.0;
  return std::acosh(target) / grid.max_wavenumber();
}

void require_sigma_gate(const GridD& grid, double sigma, double floor) {
  const double bound = safe_sigma_max(grid, floor);
  if (!(sigma >= 0.0) || sigma > bound) {
    std::ostringstream msg;
    msg << "sigma = " << sigma << " exceeds safe_sigma_max = " << bound
        << " for grid (n=" << grid.size() << ", L=" << grid.half_length()
        << ", xi_max=" << grid.max_wavenumber() << ")";
    throw OverflowError(msg.str(), grid.max_wavenumber());
  }
}

double inequality_lhs_minus_rhs(Inequality which, const WeightSample& sample) {
  const double a = sample.sigma * std::abs(sample.xi);
  // For a <= 1 both sides agree to leading order when theta = 1, so the
  // margin is formed in extended precision; for a > 1 the two sides share
  // the same rounded exponential and the comparison is monotone.
  switch (which) {
    case Inequality::ExpEst: {
      if (a <= 1.0) {
        const long double al = a;
        return static_cast<double>(
            std::expm1(al) -
            std::pow(al, static_cast<long double>(sample.theta)) *
                std::exp(al));
      }
      const double ea = weight_value(WeightKind::Exp, sample.sigma, sample.xi);
      return (ea - 1.0) - std::pow(a, sample.theta) * ea;
    }
    case Inequality::Cosh1: {
      if (a <= 1.0) {
        const long double al = a;
        const long double sh = std::sinh(0.5L * al);
        return static_cast<double>(
            2.0L * sh * sh -
            std::pow(al, 2.0L * static_cast<long double>(sample.theta)) *
                std::cosh(al));
      }
      const double ch = weight_value(WeightKind::Cosh, sample.sigma, sample.xi);
      return (ch - 1.0) - std::pow(a, 2.0 * sample.theta) * ch;
    }
    case Inequality::Equivalence: {
      const double ea = weight_value(WeightKind::Exp, sample.sigma, sample.xi);
      const double ch = weight_value(WeightKind::Cosh, sample.sigma, sample.xi);
      return std::max(0.5 * ea - ch, ch - ea);
    }
    case Inequality::CoshLemma:
      break;
  }
  throw InvalidInput("cosh_lemma takes tuples of frequencies, not (sigma, xi)");
}

double cosh_lemma_lhs(std::span<const double> xis) {
  double xi = 0.0;
  double log_prod = 0.0;
  for (double v : xis) {
    xi += v;
    log_prod += log_cosh(v);
  }
  return std::abs(std::expm1(log_cosh(xi) - log_prod));
}

double cosh_lemma_rhs(std::span<const double> xis) {
  const std::size_t p = xis.size();
  double pairs = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < p; ++k) {
      if (j != k) pairs += std::abs(xis[j]) * std::abs(xis[k]);
    }
  }
  return std::ldexp(pairs, static_cast<int>(p));
}

MarginReport inequality_margin(Inequality which,
                               std::span<const WeightSample> samples) {
  MarginReport report;
  report.which = which;
  report.count = samples.size();
  report.worst_margin = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const double margin = inequality_lhs_minus_rhs(which, s);
    if (margin > report.worst_margin || std::isnan(margin)) {
      report.worst_margin = std::isnan(margin)
                                ? std::numeric_limits<double>::infinity()
                                : margin;
      report.argmax = {s.sigma, s.xi, s.theta};
    }
  }
  return report;
}

MarginReport inequality_margin(std::span<const LemmaSample> samples) {
  MarginReport report;
  report.which = Inequality::CoshLemma;
  report.count = samples.size();
  report.worst_margin = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (s.xis.empty() || s.xis.size() > 4) {
      throw InvalidInput("cosh_lemma tuples must have 1 to 4 entries");
    }
    const double margin = cosh_lemma_lhs(s.xis) - cosh_lemma_rhs(s.xis);
    if (margin > report.worst_margin || std::isnan(margin)) {
      report.worst_margin = std::isnan(margin)
                                ? std::numeric_limits<double>::infinity()
                                : margin;
      report.argmax = s.xis;
    }
  }
  return report;
}

std::vector<WeightSample> sample_weight_inequality(std::size_t count,
                                                   double theta,
                                                   std::mt19937_64& rng,
                                                   double sigma_hi,
                                                   double xi_hi) {
  if (sigma_hi * xi_hi > kMaxWeightExponent) {
    throw InvalidInput("sample range would overflow the weights");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = std::log(1e-8);
  const double hi = std::log(xi_hi);
  std::vector<WeightSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    WeightSample s;
    s.sigma = sigma_hi * unit(rng);
    const double mag = std::exp(lo + (hi - lo) * unit(rng));
    s.xi = unit(rng) < 0.5 ? -mag : mag;
    s.theta = theta;
    out.push_back(s);
  }
  return out;
}

std::vector<LemmaSample> sample_lemma_tuples(std::size_t count, int p,
                                             std::mt19937_64& rng,
                                             double xi_hi) {
  if (p < 1 || p > 4) throw InvalidInput("cosh_lemma tuple size must be 1..4");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = std::log(1e-6);
  const double hi = std::log(xi_hi);
  std::vector<LemmaSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    LemmaSample s;
    s.xis.resize(static_cast<std::size_t>(p));
    for (auto& v : s.xis) {
      const double mag = std::exp(lo + (hi - lo) * unit(rng));
      v = unit(rng) < 0.5 ? -mag : mag;
    }
    out.push_back(std::move(s));
  }
  return out;
}

RadiusEstimate estimate_radius(const Field& f,
                               std::optional<double> noise_floor) {
  const auto& grid = f.grid();
  const Index n = grid.size();
  const double floor = noise_floor.value_or(1e-13 * f.max_abs());
  if (!(floor > 0.0)) {
    // Zero field: nothing to fit.
    return RadiusEstimate{};
  }

  // Folded magnitudes over k = 1 .. n/2 - 1.
  std::vector<double> mag(static_cast<std::size_t>(n / 2), 0.0);
  Index k_top = 0;
  for (Index k = 1; k < n / 2; ++k) {
    const double a = std::abs(f.coeff(k));
    const double b = std::abs(f.coeff(-k));
    mag[static_cast<std::size_t>(k)] = std::sqrt(0.5 * (a * a + b * b));
    if (mag[static_cast<std::size_t>(k)] > floor) k_top = k;
  }

  RadiusEstimate est;
  if (k_top == 0) return est;
  const Index k_lo = std::max<Index>(1, (k_top + 1) / 2);

  std::vector<double> xs, ys;
  for (Index k = k_lo; k <= k_top; ++k) {
    const double m = mag[static_cast<std::size_t>(k)];
    if (m > floor) {
      xs.push_back(grid.wavenumber_of_mode(k));
      ys.push_back(std::log(m));
    }
  }
  est.modes = xs.size();
  est.xi_lo = grid.wavenumber_of_mode(k_lo);
  est.xi_hi = grid.wavenumber_of_mode(k_top);
  if (xs.size() < 2) return est;

  const double count = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    ss += r * r;
  }
  est.residual = std::sqrt(ss / count);
  est.sigma_hat = std::max(0.0, -slope);

  // A trusted fit spans at least a decade of decay and the decay dominates
  // the scatter about the line.
  const double drop = est.sigma_hat * (est.xi_hi - est.xi_lo);
  est.trusted = est.modes >= kMinRadiusModes && drop >= std::log(10.0) &&
                drop >= 5.0 * est.residual;
  return est;
}

}  // namespace gmkdv
