#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gevrey_mkdv/energies.hpp"
#include "gevrey_mkdv/initial_data.hpp"
#include "gevrey_mkdv/mkdv_solver.hpp"
#include "oracles.hpp"

using namespace gmkdv;
using std::numbers::pi;

namespace {

Field sech_data(const GridD& g, double amp, double width) {
  InitialData d;
  d.amp = amp;
  d.width = width;
  return make_initial(g, d);
}

SolverConfig config(double mu, double dt, double t_final) {
  SolverConfig c;
  c.mu = mu;
  c.dt = dt;
  c.t_final = t_final;
  return c;
}

double linf_distance(const Field& a, const Field& b) {
  return (inverse(a) - inverse(b)).abs().maxCoeff();
}

}  // namespace

TEST_CASE("solver config validation") {
  CHECK_NOTHROW(validate(config(0.0, 0.1, 1.0)));
  CHECK_THROWS_AS(validate(config(2.0, 0.1, 1.0)), InvalidInput);
  CHECK_THROWS_AS(validate(config(1.0, 0.0, 1.0)), InvalidInput);
  CHECK_THROWS_AS(validate(config(1.0, 0.1, -1.0)), InvalidInput);
  SolverConfig c = config(1.0, 0.1, 1.0);
  c.dealias = 1;
  CHECK_THROWS_AS(validate(c), InvalidInput);
}

TEST_CASE("airy group") {
  std::mt19937_64 rng(8);
  const GridD g(64, 5.0);
  const Field f = oracle::random_field(g, rng);
  CHECK((airy_propagate(f, 0.0).coeffs() - f.coeffs()).abs().maxCoeff() == 0.0);
  for (double t : {0.3, 7.0, 123.4}) {
    const Field p = airy_propagate(f, t);
    CHECK((p.coeffs().abs() - f.coeffs().abs()).abs().maxCoeff() < 1e-15);
    CHECK(p.is_real());
    CHECK((airy_propagate(p, -t).coeffs() - f.coeffs()).abs().maxCoeff() < 1e-14);
  }
  // single mode: coefficient picks up exp(i xi^3 t)
  const double xi = g.wavenumber_of_mode(3);
  const Field p = airy_propagate(f, 0.25);
  CHECK(std::abs(p.coeff(3) - f.coeff(3) * std::exp(std::complex<double>(0, xi * xi * xi * 0.25))) <
        1e-15);
}

TEST_CASE("linear evolution keeps every modulus") {
  std::mt19937_64 rng(21);
  const GridD g(256, 20.0);
  const Field u0 = oracle::random_field(g, rng);
  const State end = evolve({u0, 0.0}, config(0.0, 0.01, 10.0));
  CHECK(end.t == doctest::Approx(10.0));
  CHECK((end.field.coeffs().abs() - u0.coeffs().abs()).abs().maxCoeff() <= 1e-12);

  const SolverConfig c = config(0.0, 0.05, 1.0);
  const State one = step({u0, 0.0}, c);
  CHECK((one.field.coeffs() - airy_propagate(u0, 0.05).coeffs()).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("zero field stays zero") {
  const GridD g(32, 4.0);
  const State s = evolve({Field(g), 0.0}, config(1.0, 0.01, 0.5));
  CHECK(s.field.max_abs() == 0.0);
  CHECK(nonlinear_term(Field(g), -1.0).max_abs() == 0.0);
}

TEST_CASE("fourth-order self-convergence") {
  // Resolved data on a grid where dt xi_max^3 stays moderate, so the
  // asymptotic regime is reached at these step sizes.
  const GridD g(256, 64.0 * pi);
  const Field u0 = sech_data(g, 1.5, 4.0);
  std::vector<Field> finals;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    finals.push_back(evolve({u0, 0.0}, config(-1.0, dt, 5.0)).field);
  }
  const double e1 = linf_distance(finals[0], finals[1]);
  const double e2 = linf_distance(finals[1], finals[2]);
  const double e3 = linf_distance(finals[2], finals[3]);
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(std::log2(e2 / e3) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("sample times are hit exactly") {
  const GridD g(256, 32.0 * pi);
  const Field u0 = sech_data(g, 1.0, 2.0);
  const std::vector<double> times = uniform_times(0.0, 0.3, 0.07);
  CHECK(times.size() == 6);
  CHECK(times.back() == 0.3);
  std::vector<double> seen;
  std::vector<Observer> obs{[&](const State& s) { seen.push_back(s.t); }};
  const State end = evolve({u0, 0.0}, config(-1.0, 0.02, 0.3), times, obs);
  REQUIRE(seen.size() == times.size());
  for (std::size_t i = 0; i < times.size(); ++i) CHECK(seen[i] == doctest::Approx(times[i]).epsilon(1e-14));
  CHECK(end.t == doctest::Approx(0.3).epsilon(1e-14));

  const std::vector<double> unsorted{0.2, 0.1};
  CHECK_THROWS_AS(evolve({u0, 0.0}, config(-1.0, 0.02, 0.3), unsorted, obs), InvalidInput);
  const std::vector<double> late{0.5};
  CHECK_THROWS_AS(evolve({u0, 0.0}, config(-1.0, 0.02, 0.3), late, obs), InvalidInput);
}

TEST_CASE("mass is conserved on a defocusing run") {
  const GridD g(1024, 32.0 * pi);
  const Field u0 = sech_data(g, 1.0, 2.0);
  const double m0 = std::pow(lp_norm(u0, 2), 2);
  double worst = 0.0;
  std::vector<Observer> obs{[&](const State& s) {
    worst = std::max(worst, std::abs(std::pow(lp_norm(s.field, 2), 2) - m0) / m0);
  }};
  const auto times = uniform_times(0.0, 5.0, 0.25);
  evolve({u0, 0.0}, config(-1.0, 0.01, 5.0), times, obs);
  CHECK(worst <= 1e-10);
}

TEST_CASE("focusing soliton is transported") {
  const GridD g(1024, 32.0 * pi);
  const double c = 1.0;
  const Field u0 = soliton(g, c, 0.0, 0.0);
  // The profile solves -c phi + phi'' + phi^3/3 = 0, so phi'' and phi^3 balance.
  const Eigen::ArrayXd phi = inverse(u0);
  const Eigen::ArrayXd phi_xx = inverse(derivative(u0, 2));
  CHECK((-c * phi + phi_xx + phi.cube() / 3.0).abs().maxCoeff() < 1e-8);

  const State end = evolve({u0, 0.0}, config(1.0, 1e-3, 1.0));
  CHECK(linf_distance(end.field, soliton(g, c, 0.0, 1.0)) <= 1e-6);
}

TEST_CASE("time reversal") {
  const GridD g(512, 32.0 * pi);
  const Field u0 = sech_data(g, 1.0, 2.0);
  const SolverConfig c = config(-1.0, 0.01, 1.0);
  const Field forward_run = evolve({u0, 0.0}, c).field;
  const Field back = reflect(evolve({reflect(forward_run), 0.0}, c).field);
  CHECK(linf_distance(back, u0) < 1e-9);
}

TEST_CASE("cfl and blow-up errors") {
  const GridD g(512, 32.0 * pi);
  const Field big = sech_data(g, 5.0, 2.0);
  CHECK(cfl_limit(big) == doctest::Approx(0.5 * g.dx() / 25.0).epsilon(1e-12));
  const SolverConfig c = config(-1.0, 0.05, 1.0);
  try {
    evolve({big, 0.0}, c);
    FAIL("expected CflError");
  } catch (const CflError& e) {
    CHECK(e.time() == 0.0);
  }
  CHECK_NOTHROW(check_cfl({sech_data(g, 1.0, 2.0), 0.0}, c));

  const Field huge = sech_data(g, 1e120, 2.0);
  try {
    step({huge, 0.0}, config(1.0, 1e-3, 1.0));
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.time() == doctest::Approx(1e-3));
  }
}
