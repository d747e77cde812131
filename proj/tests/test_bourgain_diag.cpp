#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "gevrey_mkdv/bourgain_diag.hpp"
#include "gevrey_mkdv/initial_data.hpp"

using namespace gmkdv;
using std::numbers::pi;
using Complex = std::complex<double>;

namespace {

Field gaussian(const GridD& g, double amp, double width) {
  InitialData d;
  d.preset = Preset::Gaussian;
  d.amp = amp;
  d.width = width;
  return make_initial(g, d);
}

Field exponential_mode(const GridD& g, int k, Complex a) {
  Field::CoeffArray c = Field::CoeffArray::Zero(g.size());
  c[g.index(k)] = a;
  return Field(g, c, false);
}

}  // namespace

TEST_CASE("window weights") {
  const Eigen::ArrayXd r = window_weights(TimeWindow::Rectangular, 20);
  CHECK((r == 1.0).all());
  const Eigen::ArrayXd t = window_weights(TimeWindow::RaisedCosine, 100);
  CHECK(t[0] == 0.0);
  CHECK(t[50] == 1.0);
  CHECK(t[10] == 1.0);
  CHECK(t[5] == doctest::Approx(0.5));
  CHECK(t[95] == doctest::Approx(0.5));
  const Eigen::ArrayXd h = window_weights(TimeWindow::Hann, 8);
  CHECK(h[4] == doctest::Approx(1.0));
  CHECK(h[2] == doctest::Approx(0.5));
  for (auto w : {TimeWindow::RaisedCosine, TimeWindow::Hann, TimeWindow::Rectangular}) {
    CHECK(time_window_from_string(to_string(w)) == w);
  }
  CHECK_THROWS_AS(time_window_from_string("kaiser"), InvalidInput);
  for (auto k : {StrichartzKind::L6, StrichartzKind::L8, StrichartzKind::Maximal,
                 StrichartzKind::Smoothing}) {
    CHECK(strichartz_kind_from_string(to_string(k)) == k);
  }
}

TEST_CASE("space-time block invariants") {
  const GridD g(32, 4.0), h(64, 4.0);
  CHECK_THROWS_AS(SpaceTimeBlock({Field(g), Field(g), Field(g)}, 1.0), InvalidInput);
  CHECK_THROWS_AS(SpaceTimeBlock({}, 1.0), InvalidInput);
  CHECK_THROWS_AS(SpaceTimeBlock({Field(g), Field(g)}, 0.0), InvalidInput);
  CHECK_THROWS_AS(SpaceTimeBlock({Field(g), Field(h)}, 1.0), InvalidInput);
  const SpaceTimeBlock b({Field(g), Field(g), Field(g), Field(g)}, 2.0);
  CHECK(b.time_step() == 0.5);
  CHECK(b.time(3) == 1.5);
  CHECK(xsb_norm(b, 0.3, 1.0, 0.6) == 0.0);
  CHECK(spacetime_lp_norm(b, 6) == 0.0);
  CHECK_THROWS_AS(xsb_norm(b, 0.0, 0.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(spacetime_lp_norm(b, 3), InvalidInput);
}

TEST_CASE("unweighted norm equals the windowed space-time L2 norm") {
  const GridD g(128, 8.0 * pi);
  const Field u0 = gaussian(g, 1.0, 1.0);
  for (auto w : {TimeWindow::RaisedCosine, TimeWindow::Hann, TimeWindow::Rectangular}) {
    const SpaceTimeBlock b = linear_block(u0, 1.0, 64, w);
    CHECK(xsb_norm(b, 0.0, 0.0, 0.0) == doctest::Approx(spacetime_lp_norm(b, 2)).epsilon(1e-12));
  }
}

TEST_CASE("single Airy mode against its windowed transform") {
  const GridD g(64, 2.0 * pi);
  const int k0 = 3;
  const double xi0 = g.wavenumber_of_mode(k0);  // 1.5
  // T puts xi0^3 exactly on the tau grid (eight periods of the phase).
  const double T = 16.0 * pi / (xi0 * xi0 * xi0);
  const Index n_t = 128;
  const Field u0 = exponential_mode(g, k0, {0.7, -0.2});
  const SpaceTimeBlock block = linear_block(u0, T, n_t);
  const Eigen::ArrayXd w = window_weights(TimeWindow::RaisedCosine, n_t);
  const double b = 0.6;

  // Direct DFT of w_j a exp(i xi0^3 t_j).
  const double dt = T / n_t;
  double weighted = 0.0, plain = 0.0;
  for (Index q = 0; q < n_t; ++q) {
    Complex s = 0.0;
    for (Index j = 0; j < n_t; ++j) {
      s += w[j] * u0.coeff(k0) * std::exp(Complex(0, xi0 * xi0 * xi0 * j * dt)) *
           std::exp(Complex(0, -2.0 * pi * q * j / n_t));
    }
    const double tau = 2.0 * pi / T * (q < n_t / 2 ? q : q - n_t);
    const double d = std::pow(1.0 + std::abs(tau - xi0 * xi0 * xi0), b);
    weighted += d * d * std::norm(s);
    plain += std::norm(s);
  }
  const double cell = dt * dt / (2.0 * pi) * g.length() * (2.0 * pi / T);
  CHECK(xsb_norm(block, 0.0, 0.0, b) == doctest::Approx(std::sqrt(weighted * cell)).epsilon(1e-12));
  CHECK(xsb_norm(block, 0.0, 0.0, 0.0) == doctest::Approx(std::sqrt(plain * cell)).epsilon(1e-12));

  // The spectrum sits at tau = xi0^3 up to window leakage into the
  // neighbouring bins, so the dispersion weight costs little.
  const double ratio = xsb_norm(block, 0.0, 0.0, b) / spacetime_lp_norm(block, 2);
  CHECK(ratio >= 1.0);
  CHECK(ratio < 1.1);
}

TEST_CASE("xsb norm is monotone in sigma, s and b") {
  const GridD g(128, 8.0 * pi);
  const SpaceTimeBlock block = linear_block(gaussian(g, 1.0, 1.0), 1.0, 64);
  double prev = 0.0;
  for (double sigma : {0.0, 0.1, 0.2, 0.4}) {
    const double v = xsb_norm(block, sigma, 0.5, 0.6);
    CHECK(v >= prev);
    prev = v;
  }
  prev = 0.0;
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    const double v = xsb_norm(block, 0.1, s, 0.6);
    CHECK(v >= prev);
    prev = v;
  }
  prev = 0.0;
  for (double b : {0.0, 0.3, 0.6, 0.9}) {
    const double v = xsb_norm(block, 0.1, 0.5, b);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(xsb_norm(block, 0.2, 0.5, 0.6, WeightKind::Exp) >= xsb_norm(block, 0.2, 0.5, 0.6));
}

TEST_CASE("automatic time resolution") {
  const GridD g(128, 8.0 * pi);
  const Field u0 = gaussian(g, 1.0, 1.0);
  const Index n_t = auto_time_samples(u0, 1.0);
  CHECK(n_t >= 64);
  CHECK((n_t & (n_t - 1)) == 0);
  double xi_cut = 0.0;
  for (Index m = 0; m < g.size(); ++m) {
    if (std::abs(u0.coeffs()[m]) > 1e-10 * u0.max_abs()) xi_cut = std::max(xi_cut, std::abs(g.xi(m)));
  }
  CHECK(static_cast<double>(n_t) >= 2.0 * std::pow(xi_cut, 3) / pi);
  CHECK(static_cast<double>(n_t) / 2.0 < std::max(64.0, 2.0 * std::pow(xi_cut, 3) / pi));
}

TEST_CASE("strichartz ratios") {
  const GridD g(128, 8.0 * pi);
  const StrichartzKind kinds[] = {StrichartzKind::L6, StrichartzKind::L8,
                                  StrichartzKind::Maximal, StrichartzKind::Smoothing};
  for (auto kind : kinds) {
    const StrichartzResult zero = strichartz_ratio(kind, Field(g), 1.0);
    CHECK(zero.ratio == 0.0);

    const Field u = gaussian(g, 1.0, 1.0);
    const StrichartzResult a = strichartz_ratio(kind, u, 1.0);
    const StrichartzResult b = strichartz_ratio(kind, 3.7 * u, 1.0);
    CHECK(std::isfinite(a.ratio));
    CHECK(a.ratio > 0.0);
    CHECK(std::abs(b.ratio - a.ratio) <= 1e-10 * a.ratio);
    CHECK(a.time_samples == b.time_samples);
  }
  CHECK_THROWS_AS(strichartz_ratio(StrichartzKind::L6, Field(g), 0.0), InvalidInput);
}

TEST_CASE("smoothing ratio of one exponential mode") {
  const GridD g(64, 4.0);
  const int k0 = 5;
  const double xi0 = g.wavenumber_of_mode(k0);
  const double T = 0.5;
  for (double amp : {0.1, 1.0, 30.0}) {
    const Field u0 = exponential_mode(g, k0, {amp, 0.5 * amp});
    const StrichartzResult r = strichartz_ratio(StrichartzKind::Smoothing, u0, T);
    const double a = std::abs(u0.coeff(k0));
    CHECK(r.lhs == doctest::Approx(xi0 * a * std::sqrt(T)).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(a * std::sqrt(g.length())).epsilon(1e-12));
    CHECK(r.ratio == doctest::Approx(xi0 * std::sqrt(T / g.length())).epsilon(1e-12));
  }
}

TEST_CASE("ratios are stable under grid refinement") {
  for (auto kind : {StrichartzKind::L6, StrichartzKind::Maximal, StrichartzKind::Smoothing}) {
    const GridD coarse(128, 8.0 * pi), fine(256, 8.0 * pi);
    const double rc = strichartz_ratio(kind, gaussian(coarse, 1.0, 1.0), 1.0).ratio;
    const double rf = strichartz_ratio(kind, gaussian(fine, 1.0, 1.0), 1.0).ratio;
    CHECK(rf <= 1.05 * rc);
  }
}
