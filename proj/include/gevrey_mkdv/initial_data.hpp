#pragma once

#include <string>

#include "gevrey_mkdv/spectral_core.hpp"

namespace gmkdv {

enum class Preset { Sech, Gaussian, Cosine, PlantedSpectrum };

std::string to_string(Preset preset);
Preset preset_from_string(const std::string& name);

struct InitialData {
  Preset preset = Preset::Sech;
  double amp = 1.0;
  double width = 1.0;  // sech(x/width), exp(-x^2 / (2 width^2))
  int mode = 1;        // cosine: amp cos(pi mode x / L)
  double sigma0 = 0.3; // planted spectrum: |u_k| proportional to exp(-sigma0 |xi_k|)
};

/// Largest tail value allowed at x = -L for the whole-line presets.
inline constexpr double kBoundaryTolerance = 1e-14;

/// Samples the preset on the grid. Sech and Gaussian data must have decayed
/// below kBoundaryTolerance * amp at the boundary; the planted spectrum is
/// scaled so that max_x u = amp.
Field make_initial(const GridD& grid, const InitialData& data);

/// Width of the strip of analyticity of the preset; infinity for entire data.
double nominal_radius(const InitialData& data);

/// Focusing travelling wave sqrt(6c) sech(sqrt(c) (x - x0 - c t)).
Field soliton(const GridD& grid, double speed, double x0, double t);

}  // namespace gmkdv
