#include "gevrey_mkdv/initial_data.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace gmkdv {

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::Sech: return "sech";
    case Preset::Gaussian: return "gaussian";
    case Preset::Cosine: return "cosine";
    case Preset::PlantedSpectrum: return "planted-spectrum";
  }
  return "unknown";
}

Preset preset_from_string(const std::string& name) {
  if (name == "sech") return Preset::Sech;
  if (name == "gaussian") return Preset::Gaussian;
  if (name == "cosine") return Preset::Cosine;
  if (name == "planted-spectrum") return Preset::PlantedSpectrum;
  throw InvalidInput("unknown initial-data preset '" + name + "'");
}

namespace {

template <typename Profile>
Eigen::ArrayXd sample(const GridD& grid, Profile&& profile) {
  Eigen::ArrayXd v(grid.size());
  for (Index j = 0; j < grid.size(); ++j) v[j] = profile(grid.x(j));
  return v;
}

void require_decay(const GridD& grid, double amp, double edge_value) {
  if (std::abs(edge_value) > kBoundaryTolerance * std::abs(amp)) {
    std::ostringstream msg;
    msg << "profile has not decayed at x = -L (|u| = " << std::abs(edge_value)
        << "); enlarge L = " << grid.half_length();
    throw InvalidInput(msg.str());
  }
}

}  // namespace

Field make_initial(const GridD& grid, const InitialData& data) {
  const double amp = data.amp;
  switch (data.preset) {
    case Preset::Sech: {
      if (!(data.width > 0.0)) throw InvalidInput("sech width must be positive");
      auto f = [&](double x) { return amp / std::cosh(x / data.width); };
      require_decay(grid, amp, f(-grid.half_length()));
      return forward(sample(grid, f), grid);
    }
    case Preset::Gaussian: {
      if (!(data.width > 0.0)) throw InvalidInput("gaussian width must be positive");
      auto f = [&](double x) {
        return amp * std::exp(-x * x / (2.0 * data.width * data.width));
      };
      require_decay(grid, amp, f(-grid.half_length()));
      return forward(sample(grid, f), grid);
    }
    case Preset::Cosine: {
      if (data.mode < 0 || data.mode >= grid.size() / 2) {
        throw InvalidInput("cosine mode must lie in [0, n/2)");
      }
      const double k = std::numbers::pi * data.mode / grid.half_length();
      return forward(sample(grid, [&](double x) { return amp * std::cos(k * x); }),
                     grid);
    }
    case Preset::PlantedSpectrum: {
      if (!(data.sigma0 > 0.0)) throw InvalidInput("planted sigma0 must be positive");
      Field::CoeffArray c(grid.size());
      for (Index m = 0; m < grid.size(); ++m) {
        c[m] = m == grid.nyquist_index()
                   ? 0.0
                   : std::exp(-data.sigma0 * std::abs(grid.xi(m)));
      }
      const Field shape(grid, c, true);
      // All coefficients are positive, so the maximum sits at x = 0.
      const double peak = c.real().sum();
      return (amp / peak) * shape;
    }
  }
  throw InvalidInput("unhandled preset");
}

double nominal_radius(const InitialData& data) {
  switch (data.preset) {
    case Preset::Sech: return std::numbers::pi * data.width / 2.0;
    case Preset::PlantedSpectrum: return data.sigma0;
    default: return std::numeric_limits<double>::infinity();
  }
}

Field soliton(const GridD& grid, double speed, double x0, double t) {
  if (!(speed > 0.0)) throw InvalidInput("soliton speed must be positive");
  const double root = std::sqrt(speed);
  const double height = std::sqrt(6.0 * speed);
  const double period = grid.length();
  auto f = [&](double x) {
    // distance to the nearest periodic image of the crest
    double d = x - x0 - speed * t;
    d -= period * std::round(d / period);
    return height / std::cosh(root * d);
  };
  return forward(sample(grid, f), grid);
}

}  // namespace gmkdv
