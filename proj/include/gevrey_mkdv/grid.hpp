#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gevrey_mkdv/errors.hpp"

namespace gmkdv {

using Eigen::Index;

/// Uniform periodic grid on [-L, L) with n points.
///
/// Storage order for spectral data is the usual FFT order: index m in
/// [0, n/2) holds mode k = m, index m in [n/2, n) holds k = m - n. The mode
/// k = -n/2 is the unpaired Nyquist mode. Wavenumbers are xi_k = pi k / L.
template <typename Scalar = double>
class Grid {
 public:
  using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Grid(Index n, Scalar half_length) : n_(n), half_length_(half_length) {
    if (n < 8 || (n & (n - 1)) != 0) {
      std::ostringstream msg;
      msg << "grid point count must be a power of two >= 8, got " << n;
      throw InvalidInput(msg.str());
    }
    if (!(half_length > Scalar(0)) || !std::isfinite(half_length)) {
      throw InvalidInput("grid half length must be positive and finite");
    }
  }

  Index size() const { return n_; }
  Scalar half_length() const { return half_length_; }
  Scalar length() const { return Scalar(2) * half_length_; }
  Scalar dx() const { return length() / Scalar(n_); }

  Scalar x(Index j) const { return -half_length_ + Scalar(j) * dx(); }

  /// Signed mode number stored at position `index`.
  Index mode(Index index) const { return index < n_ / 2 ? index : index - n_; }
  /// Storage position of signed mode `k`, k in [-n/2, n/2).
  Index index(Index k) const { return k >= 0 ? k : k + n_; }
  Index nyquist_index() const { return n_ / 2; }

  Scalar wavenumber_of_mode(Index k) const {
    return std::numbers::pi_v<Scalar> * Scalar(k) / half_length_;
  }
  /// Wavenumber at storage position `index`.
  Scalar xi(Index index) const { return wavenumber_of_mode(mode(index)); }
  /// Largest |xi| on the grid (the Nyquist magnitude).
  Scalar max_wavenumber() const { return wavenumber_of_mode(n_ / 2); }
  /// Mode spacing pi / L.
  Scalar dxi() const { return std::numbers::pi_v<Scalar> / half_length_; }

  RealArray points() const {
    RealArray out(n_);
    for (Index j = 0; j < n_; ++j) out[j] = x(j);
    return out;
  }

  RealArray wavenumbers() const {
    RealArray out(n_);
    for (Index m = 0; m < n_; ++m) out[m] = xi(m);
    return out;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.half_length_ == b.half_length_;
  }

 private:
  Index n_;
  Scalar half_length_;
};

}  // namespace gmkdv
