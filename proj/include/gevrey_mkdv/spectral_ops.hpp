#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <type_traits>

#include "gevrey_mkdv/errors.hpp"
#include "gevrey_mkdv/grid.hpp"
#include "gevrey_mkdv/spectral_field.hpp"

namespace gmkdv {

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  // kissfft caches twiddles per length; one engine per thread keeps the
  // transforms free of shared mutable state.
  thread_local Eigen::FFT<Scalar> engine = [] {
    Eigen::FFT<Scalar> e;
    e.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    return e;
  }();
  return engine;
}

/// (-1)^k for storage index m. Equal to (-1)^mode(m) because n is even.
inline double parity_sign(Index m) { return (m & 1) ? -1.0 : 1.0; }

template <typename Scalar>
void require_same_grid(const Grid<Scalar>& a, const Grid<Scalar>& b) {
  if (!(a == b)) {
    std::ostringstream msg;
    msg << "grid mismatch: (n=" << a.size() << ", L=" << a.half_length()
        << ") vs (n=" << b.size() << ", L=" << b.half_length() << ")";
    throw InvalidInput(msg.str());
  }
}

/// Samples of the trigonometric polynomial carried by `f` on the grid of M
/// points x_j = -L + j 2L/M. The Nyquist mode is dropped, so the result is the
/// band-limited interpolant with modes |k| < n/2.
template <typename Scalar>
Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> padded_samples(
    const SpectralField<Scalar>& f, Index padded_size) {
  using Complex = std::complex<Scalar>;
  const Index n = f.size();
  const Index M = padded_size;
  Eigen::Array<Complex, Eigen::Dynamic, 1> spec =
      Eigen::Array<Complex, Eigen::Dynamic, 1>::Zero(M);
  for (Index k = -n / 2 + 1; k < n / 2; ++k) {
    const Index src = f.grid().index(k);
    const Index dst = k >= 0 ? k : k + M;
    spec[dst] = Scalar(parity_sign(k >= 0 ? k : -k)) * f.coeffs()[src];
  }
  Eigen::Array<Complex, Eigen::Dynamic, 1> out(M);
  fft_engine<Scalar>().inv(out.data(), spec.data(), M);
  return out;
}

/// Spectral coefficients of M samples (on the M-point grid), truncated to
/// the modes |k| < n/2 of `grid`; the Nyquist mode is left zero.
template <typename Scalar>
Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> truncate_samples(
    const Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>& samples,
    const Grid<Scalar>& grid) {
  using Complex = std::complex<Scalar>;
  const Index n = grid.size();
  const Index M = samples.size();
  Eigen::Array<Complex, Eigen::Dynamic, 1> spec(M);
  fft_engine<Scalar>().fwd(spec.data(), samples.data(), M);
  Eigen::Array<Complex, Eigen::Dynamic, 1> out =
      Eigen::Array<Complex, Eigen::Dynamic, 1>::Zero(n);
  const Scalar inv_m = Scalar(1) / Scalar(M);
  for (Index k = -n / 2 + 1; k < n / 2; ++k) {
    const Index src = k >= 0 ? k : k + M;
    out[grid.index(k)] =
        Scalar(parity_sign(k >= 0 ? k : -k)) * inv_m * spec[src];
  }
  return out;
}

/// Smallest padded length that integrates a product of `factors`
/// band-limited fields exactly: M > factors (n/2 - 1).
inline Index integration_length(Index n, int factors) {
  const Index mult = std::max<Index>(1, (factors + 1) / 2);
  return mult * n;
}

}  // namespace detail

/// Fourier coefficients of real samples taken at x_j = -L + j dx.
template <typename Scalar>
SpectralField<Scalar> forward(
    const Eigen::Array<Scalar, Eigen::Dynamic, 1>& samples,
    const Grid<Scalar>& grid) {
  using Complex = std::complex<Scalar>;
  const Index n = grid.size();
  if (samples.size() != n) {
    std::ostringstream msg;
    msg << "forward: " << samples.size() << " samples for a grid of " << n;
    throw InvalidInput(msg.str());
  }
  Eigen::Array<Complex, Eigen::Dynamic, 1> in = samples.template cast<Complex>();
  Eigen::Array<Complex, Eigen::Dynamic, 1> out(n);
  detail::fft_engine<Scalar>().fwd(out.data(), in.data(), n);
  const Scalar inv_n = Scalar(1) / Scalar(n);
  for (Index m = 0; m < n; ++m) out[m] *= Scalar(detail::parity_sign(m)) * inv_n;
  return SpectralField<Scalar>(grid, std::move(out), true);
}

/// Fourier coefficients of complex samples; the result is not flagged real.
template <typename Scalar>
SpectralField<Scalar> forward_complex(
    const Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>& samples,
    const Grid<Scalar>& grid) {
  using Complex = std::complex<Scalar>;
  const Index n = grid.size();
  if (samples.size() != n) {
    std::ostringstream msg;
    msg << "forward_complex: " << samples.size() << " samples for a grid of "
        << n;
    throw InvalidInput(msg.str());
  }
  Eigen::Array<Complex, Eigen::Dynamic, 1> out(n);
  detail::fft_engine<Scalar>().fwd(out.data(), samples.data(), n);
  const Scalar inv_n = Scalar(1) / Scalar(n);
  for (Index m = 0; m < n; ++m) out[m] *= Scalar(detail::parity_sign(m)) * inv_n;
  return SpectralField<Scalar>(grid, std::move(out), false);
}

/// Complex samples u(x_j) of any field, Nyquist mode included.
template <typename Scalar>
Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> inverse_complex(
    const SpectralField<Scalar>& f) {
  using Complex = std::complex<Scalar>;
  const Index n = f.size();
  Eigen::Array<Complex, Eigen::Dynamic, 1> spec(n);
  for (Index m = 0; m < n; ++m)
    spec[m] = Scalar(detail::parity_sign(m)) * f.coeffs()[m];
  Eigen::Array<Complex, Eigen::Dynamic, 1> out(n);
  detail::fft_engine<Scalar>().inv(out.data(), spec.data(), n);
  return out;
}

/// Real samples u(x_j) of a real field.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> inverse(const SpectralField<Scalar>& f) {
  if (!f.is_real()) throw InvalidInput("inverse: field is not flagged real");
  return inverse_complex(f).real();
}

/// p-th derivative: coefficients times (i xi)^p. For odd p the Nyquist mode
/// is zeroed so that real fields stay real.
template <typename Scalar>
SpectralField<Scalar> derivative(const SpectralField<Scalar>& f, int p) {
  using Complex = std::complex<Scalar>;
  if (p < 1) throw InvalidInput("derivative order must be >= 1");
  const auto& grid = f.grid();
  const Index n = grid.size();
  Complex ipow(1, 0);
  switch (p % 4) {
    case 1: ipow = Complex(0, 1); break;
    case 2: ipow = Complex(-1, 0); break;
    case 3: ipow = Complex(0, -1); break;
    default: break;
  }
  typename SpectralField<Scalar>::CoeffArray out(n);
  for (Index m = 0; m < n; ++m) {
    out[m] = ipow * std::pow(grid.xi(m), p) * f.coeffs()[m];
  }
  if (p % 2 == 1) out[grid.nyquist_index()] = Complex(0, 0);
  return SpectralField<Scalar>(grid, std::move(out), f.is_real());
}

/// Fourier multiplier: coefficient at xi_k scaled by m(xi_k). An even symbol
/// keeps real fields real; any other symbol yields a field flagged complex.
template <typename Scalar, typename Symbol>
SpectralField<Scalar> multiplier(const SpectralField<Scalar>& f,
                                 const Symbol& m) {
  const auto& grid = f.grid();
  const Index n = grid.size();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> values(n);
  for (Index idx = 0; idx < n; ++idx) {
    const Scalar xi = grid.xi(idx);
    const Scalar v = static_cast<Scalar>(m(xi));
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "multiplier is not finite at xi = " << xi;
      throw OverflowError(msg.str(), static_cast<double>(xi));
    }
    values[idx] = v;
  }
  bool even = true;
  for (Index idx = 1; idx < n / 2 && even; ++idx) {
    even = values[idx] == values[n - idx];
  }
  typename SpectralField<Scalar>::CoeffArray out = f.coeffs() * values;
  return SpectralField<Scalar>(grid, std::move(out), f.is_real() && even);
}

/// Alias-free product f1 f2, using zero padding to `pad` * n points.
template <typename Scalar>
SpectralField<Scalar> product(const SpectralField<Scalar>& f1,
                              const SpectralField<Scalar>& f2, int pad = 2) {
  detail::require_same_grid(f1.grid(), f2.grid());
  if (pad < 2) throw InvalidInput("quadratic products need padding >= 2");
  const Index M = pad * f1.size();
  auto s = detail::padded_samples(f1, M);
  s *= detail::padded_samples(f2, M);
  const bool real = f1.is_real() && f2.is_real();
  if (real) s = s.real().template cast<std::complex<Scalar>>();
  return SpectralField<Scalar>(f1.grid(), detail::truncate_samples(s, f1.grid()),
                               real);
}

/// Alias-free cubic product f1 f2 f3: each input is zero-padded to
/// `pad` * n >= 2n points, multiplied pointwise, transformed back and
/// truncated to the modes |k| < n/2.
template <typename Scalar>
SpectralField<Scalar> dealiased_product(const SpectralField<Scalar>& f1,
                                        const SpectralField<Scalar>& f2,
                                        const SpectralField<Scalar>& f3,
                                        int pad = 2) {
  detail::require_same_grid(f1.grid(), f2.grid());
  detail::require_same_grid(f1.grid(), f3.grid());
  if (pad < 2) throw InvalidInput("cubic products need padding >= 2");
  const Index M = pad * f1.size();
  auto s = detail::padded_samples(f1, M);
  s *= detail::padded_samples(f2, M);
  s *= detail::padded_samples(f3, M);
  const bool real = f1.is_real() && f2.is_real() && f3.is_real();
  if (real) s = s.real().template cast<std::complex<Scalar>>();
  return SpectralField<Scalar>(f1.grid(), detail::truncate_samples(s, f1.grid()),
                               real);
}

/// Cube of one field (the common case in the solver).
template <typename Scalar>
SpectralField<Scalar> dealiased_cube(const SpectralField<Scalar>& f,
                                     int pad = 2) {
  if (pad < 2) throw InvalidInput("cubic products need padding >= 2");
  const Index M = pad * f.size();
  auto s = detail::padded_samples(f, M);
  s = s * s * s;
  if (f.is_real()) s = s.real().template cast<std::complex<Scalar>>();
  return SpectralField<Scalar>(f.grid(), detail::truncate_samples(s, f.grid()),
                               f.is_real());
}

/// Exact integral over [-L, L) of the product of real fields (Nyquist modes
/// excluded), evaluated on a grid padded far enough that no aliasing reaches
/// the mean mode.
template <typename Scalar, typename... Rest>
Scalar integrate_product(const SpectralField<Scalar>& first,
                         const Rest&... rest) {
  static_assert((std::is_same_v<Rest, SpectralField<Scalar>> && ...),
                "integrate_product takes fields of one scalar type");
  (detail::require_same_grid(first.grid(), rest.grid()), ...);
  if (!first.is_real() || !(rest.is_real() && ...)) {
    throw InvalidInput("integrate_product: all fields must be real");
  }
  constexpr int factors = 1 + static_cast<int>(sizeof...(Rest));
  const Index M = detail::integration_length(first.size(), factors);
  Eigen::Array<Scalar, Eigen::Dynamic, 1> s =
      detail::padded_samples(first, M).real();
  ((s *= detail::padded_samples(rest, M).real()), ...);
  return s.sum() * first.grid().length() / Scalar(M);
}

/// L^p norm by grid quadrature, p in {2, 4, 6, infinity}.
template <typename Scalar>
Scalar lp_norm(const SpectralField<Scalar>& f, double p) {
  const bool inf = std::isinf(p) && p > 0;
  if (!(inf || p == 2 || p == 4 || p == 6)) {
    std::ostringstream msg;
    msg << "lp_norm: unsupported exponent " << p;
    throw InvalidInput(msg.str());
  }
  if (!f.is_real()) throw InvalidInput("lp_norm: field must be real");
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> s = inverse(f).abs();
  if (inf) return s.maxCoeff();
  const Scalar sum = s.pow(Scalar(p)).sum() * f.grid().dx();
  return std::pow(sum, Scalar(1) / Scalar(p));
}

/// Reflection x -> -x: coefficient of mode k moves to mode -k.
template <typename Scalar>
SpectralField<Scalar> reflect(const SpectralField<Scalar>& f) {
  const Index n = f.size();
  typename SpectralField<Scalar>::CoeffArray out(n);
  out[0] = f.coeffs()[0];
  out[n / 2] = f.coeffs()[n / 2];
  for (Index m = 1; m < n; ++m) {
    if (m == n / 2) continue;
    out[n - m] = f.coeffs()[m];
  }
  return SpectralField<Scalar>(f.grid(), std::move(out), f.is_real());
}

template <typename Scalar>
SpectralField<Scalar> operator+(const SpectralField<Scalar>& a,
                                const SpectralField<Scalar>& b) {
  detail::require_same_grid(a.grid(), b.grid());
  return SpectralField<Scalar>(a.grid(), a.coeffs() + b.coeffs(),
                               a.is_real() && b.is_real());
}

template <typename Scalar>
SpectralField<Scalar> operator-(const SpectralField<Scalar>& a,
                                const SpectralField<Scalar>& b) {
  detail::require_same_grid(a.grid(), b.grid());
  return SpectralField<Scalar>(a.grid(), a.coeffs() - b.coeffs(),
                               a.is_real() && b.is_real());
}

template <typename Scalar>
SpectralField<Scalar> operator*(Scalar c, const SpectralField<Scalar>& a) {
  return SpectralField<Scalar>(a.grid(), a.coeffs() * c, a.is_real());
}

/// Sup-norm distance in physical space.
template <typename Scalar>
Scalar max_abs_difference(const SpectralField<Scalar>& a,
                          const SpectralField<Scalar>& b) {
  detail::require_same_grid(a.grid(), b.grid());
  return (inverse_complex(a) - inverse_complex(b)).abs().maxCoeff();
}

}  // namespace gmkdv
