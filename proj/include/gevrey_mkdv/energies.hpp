#pragma once

#include "gevrey_mkdv/gevrey_weights.hpp"
#include "gevrey_mkdv/spectral_core.hpp"

namespace gmkdv {

/// The separate integrals that make up the modified energy of a weighted
/// field U. Kept unsigned so a sign error in mu can be located term by term.
struct EnergyTerms {
  double l2 = 0.0;       // int U^2
  double grad2 = 0.0;    // int (U_x)^2
  double quartic = 0.0;  // int U^4
  double lap2 = 0.0;     // int (U_xx)^2
  double sextic = 0.0;   // int U^6
  double mixed = 0.0;    // int (U U_x)^2
};

/// All integrals of `weighted` (already multiplied by its weight), each
/// evaluated exactly by zero-padded quadrature.
EnergyTerms energy_terms(const Field& weighted);

/// I0 = int U^2, I1 = int U_x^2 - (mu/6) int U^4,
/// I2 = int U_xx^2 + (1/18) int U^6 - (5 mu/3) int (U U_x)^2.
struct EnergyLedger {
  double i0 = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double a_sigma = 0.0;  // i0 + i1 + i2
  double mass = 0.0;       // int u^2
  double h1_energy = 0.0;  // I1 at sigma = 0
  double i2_at_zero = 0.0; // I2 at sigma = 0
  double t = 0.0;
  double sigma = 0.0;
  double mu = 0.0;
  WeightKind kind = WeightKind::Cosh;
  EnergyTerms terms;  // of U
};

double level0(const EnergyTerms& terms);
double level1(const EnergyTerms& terms, double mu);
double level2(const EnergyTerms& terms, double mu);

/// Modified energy of u with U = w(sigma|D|) u, w = cosh by default.
/// Throws OverflowError when sigma exceeds safe_sigma_max of u's grid.
EnergyLedger modified_energy(const Field& u, double sigma, double mu,
                             WeightKind kind = WeightKind::Cosh, double t = 0.0);

struct ClassicalInvariants {
  double mass = 0.0;
  double h1_energy = 0.0;
  double i2_at_zero = 0.0;
};

/// The three conserved functionals at sigma = 0.
ClassicalInvariants classical_invariants(const Field& u, double mu);

/// I0 + I1 of w(sigma|D|) u: the H^1-level modified energy. With kind = Exp
/// this is the exponential-weight functional whose defect only scales like
/// sigma^1.
double h1_level_energy(const Field& u, double sigma, double mu,
                       WeightKind kind);

}  // namespace gmkdv
