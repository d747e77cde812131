#include "gevrey_mkdv/bourgain_diag.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gevrey_mkdv/mkdv_solver.hpp"

namespace gmkdv {

namespace {

using Complex = std::complex<double>;

constexpr double kTaperFraction = 0.1;

}  // namespace

std::string to_string(TimeWindow window) {
  switch (window) {
    case TimeWindow::RaisedCosine: return "raised_cosine";
    case TimeWindow::Hann: return "hann";
    case TimeWindow::Rectangular: return "rectangular";
  }
  return "unknown";
}

TimeWindow time_window_from_string(const std::string& name) {
  if (name == "raised_cosine") return TimeWindow::RaisedCosine;
  if (name == "hann") return TimeWindow::Hann;
  if (name == "rectangular") return TimeWindow::Rectangular;
  throw InvalidInput("unknown time window '" + name + "'");
}

std::string to_string(StrichartzKind kind) {
  switch (kind) {
    case StrichartzKind::L6: return "L6";
    case StrichartzKind::L8: return "L8";
    case StrichartzKind::Maximal: return "maximal";
    case StrichartzKind::Smoothing: return "smoothing";
  }
  return "unknown";
}

StrichartzKind strichartz_kind_from_string(const std::string& name) {
  if (name == "L6") return StrichartzKind::L6;
  if (name == "L8") return StrichartzKind::L8;
  if (name == "maximal") return StrichartzKind::Maximal;
  if (name == "smoothing") return StrichartzKind::Smoothing;
  throw InvalidInput("unknown Strichartz kind '" + name + "'");
}

Eigen::ArrayXd window_weights(TimeWindow window, Index n_t) {
  Eigen::ArrayXd w = Eigen::ArrayXd::Ones(n_t);
  const double pi = std::numbers::pi;
  for (Index j = 0; j < n_t; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(n_t);
    switch (window) {
      case TimeWindow::Rectangular:
        break;
      case TimeWindow::Hann:
        w[j] = 0.5 * (1.0 - std::cos(2.0 * pi * x));
        break;
      case TimeWindow::RaisedCosine:
        if (x < kTaperFraction) {
          w[j] = 0.5 * (1.0 - std::cos(pi * x / kTaperFraction));
        } else if (x > 1.0 - kTaperFraction) {
          w[j] = 0.5 * (1.0 - std::cos(pi * (1.0 - x) / kTaperFraction));
        }
        break;
    }
  }
  return w;
}

SpaceTimeBlock::SpaceTimeBlock(std::vector<Field> values, double t_blk,
                               TimeWindow window)
    : values_(std::move(values)), t_blk_(t_blk), window_(window) {
  if (values_.empty() || values_.size() % 2 != 0) {
    throw InvalidInput("space-time block needs an even, nonzero sample count");
  }
  if (!(t_blk > 0.0)) throw InvalidInput("block duration must be positive");
  for (const auto& f : values_) detail::require_same_grid(f.grid(), grid());
}

SpaceTimeBlock linear_block(const Field& data, double t_blk, Index n_t,
                            TimeWindow window) {
  std::vector<Field> values;
  values.reserve(static_cast<std::size_t>(n_t));
  for (Index j = 0; j < n_t; ++j) {
    values.push_back(airy_propagate(
        data, static_cast<double>(j) * t_blk / static_cast<double>(n_t)));
  }
  return SpaceTimeBlock(std::move(values), t_blk, window);
}

double xsb_norm(const SpaceTimeBlock& block, double sigma, double s, double b,
                WeightKind kind) {
  if (!(b > -1.0 && b < 1.0)) throw InvalidInput("xsb_norm: b must lie in (-1, 1)");
  const GridD& grid = block.grid();
  const Index n = grid.size();
  const Index n_t = block.time_samples();
  const double T = block.duration();
  const double dt = block.time_step();
  const Eigen::ArrayXd w = window_weights(block.window(), n_t);
  const double tau_step = 2.0 * std::numbers::pi / T;
  auto& fft = detail::fft_engine<double>();

  Eigen::ArrayXcd series(n_t), spectrum(n_t);
  double total = 0.0;
  for (Index m = 0; m < n; ++m) {
    const double xi = grid.xi(m);
    for (Index j = 0; j < n_t; ++j) series[j] = w[j] * block.values()[j].coeffs()[m];
    if ((series.abs() == 0.0).all()) continue;
    fft.fwd(spectrum.data(), series.data(), n_t);
    const double space_weight =
        weight_value(kind, sigma, xi) * std::pow(bracket(xi), s);
    double mode_sum = 0.0;
    for (Index q = 0; q < n_t; ++q) {
      const Index mode = q < n_t / 2 ? q : q - n_t;
      const double tau = tau_step * static_cast<double>(mode);
      const double disp = std::pow(1.0 + std::abs(tau - xi * xi * xi), b);
      mode_sum += disp * disp * std::norm(spectrum[q]);
    }
    total += space_weight * space_weight * mode_sum;
  }
  // u_hat(xi, tau) = dt * DFT / sqrt(2 pi); cell area 2L * 2 pi / T.
  const double scale = dt * dt / (2.0 * std::numbers::pi) * grid.length() * tau_step;
  return std::sqrt(total * scale);
}

double spacetime_lp_norm(const SpaceTimeBlock& block, int p) {
  if (p < 2 || p % 2 != 0) throw InvalidInput("spacetime_lp_norm: p must be even");
  const GridD& grid = block.grid();
  const Index M = grid.size() * (p / 2);
  const Eigen::ArrayXd w = window_weights(block.window(), block.time_samples());
  double sum = 0.0;
  for (Index j = 0; j < block.time_samples(); ++j) {
    const Eigen::ArrayXd mag =
        w[j] * detail::padded_samples(block.values()[j], M).abs();
    sum += mag.pow(static_cast<double>(p)).sum();
  }
  sum *= grid.length() / static_cast<double>(M) * block.time_step();
  return std::pow(sum, 1.0 / static_cast<double>(p));
}

Index auto_time_samples(const Field& data, double t_blk) {
  const auto& grid = data.grid();
  const double peak = data.max_abs();
  double xi_cut = 0.0;
  for (Index m = 0; m < grid.size(); ++m) {
    if (std::abs(data.coeffs()[m]) > 1e-10 * peak) {
      xi_cut = std::max(xi_cut, std::abs(grid.xi(m)));
    }
  }
  const double needed = 2.0 * xi_cut * xi_cut * xi_cut * t_blk / std::numbers::pi;
  Index n_t = 64;
  while (static_cast<double>(n_t) < needed && n_t < (Index{1} << 16)) n_t *= 2;
  return n_t;
}

StrichartzResult strichartz_ratio(StrichartzKind kind, const Field& data,
                                  double t_blk,
                                  const StrichartzOptions& options) {
  if (!(t_blk > 0.0)) throw InvalidInput("strichartz_ratio: T_blk must be > 0");
  StrichartzResult result;
  result.time_samples = options.time_samples > 0
                            ? options.time_samples
                            : auto_time_samples(data, t_blk);
  if (data.max_abs() == 0.0) return result;

  const SpaceTimeBlock block =
      linear_block(data, t_blk, result.time_samples, options.window);
  const GridD& grid = data.grid();
  const Index n = grid.size();

  switch (kind) {
    case StrichartzKind::L6:
    case StrichartzKind::L8: {
      const int p = kind == StrichartzKind::L6 ? 6 : 8;
      result.lhs = spacetime_lp_norm(block, p);
      result.rhs = xsb_norm(block, 0.0, 0.0, options.b);
      break;
    }
    case StrichartzKind::Maximal: {
      Eigen::ArrayXd sup = Eigen::ArrayXd::Zero(n);
      for (const auto& f : block.values()) sup = sup.max(inverse_complex(f).abs());
      result.lhs = std::sqrt(sup.square().sum() * grid.dx());
      result.rhs = gevrey_norm(data, {0.0, options.s_maximal, WeightKind::Cosh});
      break;
    }
    case StrichartzKind::Smoothing: {
      Eigen::ArrayXd l2t = Eigen::ArrayXd::Zero(n);
      for (const auto& f : block.values()) {
        l2t += inverse_complex(derivative(f, 1)).abs2();
      }
      result.lhs = std::sqrt(l2t.maxCoeff() * block.time_step());
      result.rhs = gevrey_norm(data, {0.0, 0.0, WeightKind::Cosh});
      break;
    }
  }
  result.ratio = result.rhs > 0.0 ? result.lhs / result.rhs : 0.0;
  return result;
}

}  // namespace gmkdv
