#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <complex>
#include <limits>
#include <sstream>
#include <utility>

#include "gevrey_mkdv/errors.hpp"
#include "gevrey_mkdv/grid.hpp"

namespace gmkdv {

/// A function of x held as its Fourier coefficients on a periodic grid.
///
/// coeffs()[m] is u_hat(xi) for xi = grid().xi(m), under the convention
///   u_hat(xi_k) = (1/n) sum_j u(x_j) exp(-i xi_k x_j).
/// The realness flag records whether the field represents a real function;
/// a field flagged real always has exactly Hermitian coefficients.
template <typename Scalar = double>
class SpectralField {
 public:
  using Complex = std::complex<Scalar>;
  using CoeffArray = Eigen::Array<Complex, Eigen::Dynamic, 1>;
  using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using GridType = Grid<Scalar>;

  /// Zero field.
  explicit SpectralField(const GridType& grid)
      : grid_(grid), coeffs_(CoeffArray::Zero(grid.size())), real_(true) {}

  /// Takes ownership of `coeffs`. When `real` is set, the coefficients must be
  /// Hermitian to round-off; they are then symmetrized exactly.
  SpectralField(const GridType& grid, CoeffArray coeffs, bool real)
      : grid_(grid), coeffs_(std::move(coeffs)), real_(real) {
    if (coeffs_.size() != grid_.size()) {
      std::ostringstream msg;
      msg << "coefficient array has length " << coeffs_.size()
          << " but grid has " << grid_.size() << " points";
      throw InvalidInput(msg.str());
    }
    if (real_) enforce_hermitian();
  }

  const GridType& grid() const { return grid_; }
  const CoeffArray& coeffs() const { return coeffs_; }
  bool is_real() const { return real_; }
  Index size() const { return grid_.size(); }

  /// Coefficient of signed mode k.
  Complex coeff(Index k) const { return coeffs_[grid_.index(k)]; }

  /// Largest violation of coeffs(-k) = conj(coeffs(k)), including the
  /// imaginary parts of the self-paired modes 0 and -n/2.
  Scalar hermitian_defect() const {
    const Index n = grid_.size();
    Scalar worst = std::abs(coeffs_[0].imag());
    worst = std::max(worst, std::abs(coeffs_[n / 2].imag()));
    for (Index m = 1; m < n / 2; ++m) {
      worst = std::max(worst, std::abs(coeffs_[m] - std::conj(coeffs_[n - m])));
    }
    return worst;
  }

  Scalar max_abs() const {
    return coeffs_.size() == 0 ? Scalar(0) : coeffs_.abs().maxCoeff();
  }

  /// True when no coefficient is NaN or Inf.
  bool all_finite() const {
    return coeffs_.real().isFinite().all() && coeffs_.imag().isFinite().all();
  }

 private:
  void enforce_hermitian() {
    const Scalar scale = max_abs();
    const Scalar tol =
        Scalar(1e-10) * scale + std::numeric_limits<Scalar>::min();
    const Scalar defect = hermitian_defect();
    if (!(defect <= tol)) {
      std::ostringstream msg;
      msg << "field flagged real has Hermitian defect " << defect
          << " (scale " << scale << ")";
      throw RealnessError(msg.str());
    }
    const Index n = grid_.size();
    coeffs_[0] = Complex(coeffs_[0].real(), 0);
    coeffs_[n / 2] = Complex(coeffs_[n / 2].real(), 0);
    for (Index m = 1; m < n / 2; ++m) {
      const Complex avg = Scalar(0.5) * (coeffs_[m] + std::conj(coeffs_[n - m]));
      coeffs_[m] = avg;
      coeffs_[n - m] = std::conj(avg);
    }
  }

  GridType grid_;
  CoeffArray coeffs_;
  bool real_;
};

using Field = SpectralField<double>;
using GridD = Grid<double>;

}  // namespace gmkdv
