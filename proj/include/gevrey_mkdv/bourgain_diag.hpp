#pragma once

#include <string>
#include <vector>

#include "gevrey_mkdv/gevrey_weights.hpp"
#include "gevrey_mkdv/spectral_core.hpp"

namespace gmkdv {

/// Taper applied in t before the temporal transform. RaisedCosine is a Tukey
/// window with 10% cosine ramps at each end.
enum class TimeWindow { RaisedCosine, Hann, Rectangular };

std::string to_string(TimeWindow window);
TimeWindow time_window_from_string(const std::string& name);

/// Periodic window weights at t_j = j T / n_t.
Eigen::ArrayXd window_weights(TimeWindow window, Index n_t);

/// n_t fields at t_j = j T_blk / n_t, j = 0..n_t-1, all on one grid.
class SpaceTimeBlock {
 public:
  SpaceTimeBlock(std::vector<Field> values, double t_blk,
                 TimeWindow window = TimeWindow::RaisedCosine);

  const GridD& grid() const { return values_.front().grid(); }
  const std::vector<Field>& values() const { return values_; }
  Index time_samples() const { return static_cast<Index>(values_.size()); }
  double duration() const { return t_blk_; }
  double time_step() const { return t_blk_ / static_cast<double>(values_.size()); }
  double time(Index j) const { return static_cast<double>(j) * time_step(); }
  TimeWindow window() const { return window_; }

 private:
  std::vector<Field> values_;
  double t_blk_;
  TimeWindow window_;
};

/// Block holding the Airy evolution of `data` over [0, t_blk).
SpaceTimeBlock linear_block(const Field& data, double t_blk, Index n_t,
                            TimeWindow window = TimeWindow::RaisedCosine);

/// Discrete X^{sigma,s,b} norm of the windowed block: the time DFT gives
/// u_hat(xi_k, tau_m) with tau_m = 2 pi m / T_blk, weighted by
/// w(sigma|xi|) <xi>^s <tau - xi^3>^b and summed with cell area
/// 2L (2 pi / T_blk). The window makes this an upper-bound surrogate for the
/// time-restricted norm, not its infimum.
double xsb_norm(const SpaceTimeBlock& block, double sigma, double s, double b,
                WeightKind kind = WeightKind::Cosh);

/// Space-time L^p norm of the windowed block (p even), exact in x.
double spacetime_lp_norm(const SpaceTimeBlock& block, int p);

enum class StrichartzKind { L6, L8, Maximal, Smoothing };

std::string to_string(StrichartzKind kind);
StrichartzKind strichartz_kind_from_string(const std::string& name);

struct StrichartzOptions {
  double b = 0.6;            // any b > 1/2
  double s_maximal = 0.8;    // H^s index for the maximal estimate, s > 3/4
  Index time_samples = 0;    // 0 selects from the data bandwidth
  TimeWindow window = TimeWindow::RaisedCosine;
};

struct StrichartzResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  Index time_samples = 0;
};

/// Evolves `data` by the Airy group over [0, t_blk) and returns LHS / RHS of
///   L6, L8:    ||u||_{L^p_{x,t}}        / ||u||_{X^{0,b}}
///   Maximal:   ||u||_{L^2_x L^inf_T}     / ||u0||_{H^s}
///   Smoothing: ||u_x||_{L^inf_x L^2_T}   / ||u0||_{L^2}
/// Zero data gives ratio 0.
StrichartzResult strichartz_ratio(StrichartzKind kind, const Field& data,
                                  double t_blk,
                                  const StrichartzOptions& options = {});

/// Power of two n_t whose temporal Nyquist frequency covers twice the largest
/// xi^3 carried by `data` above 1e-10 of its peak coefficient.
Index auto_time_samples(const Field& data, double t_blk);

}  // namespace gmkdv
