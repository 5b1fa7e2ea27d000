#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "whitham/symbols.hpp"

namespace whitham {

using Complex = std::complex<double>;

/// Uniform discretization of a torus of circumference `length` with a
/// power-of-two number of collocation points x_j = j * length / n.
class PeriodicGrid {
 public:
  /// Throws ConfigError unless length > 0 and n_modes is a power of two >= 8.
  PeriodicGrid(double length, std::size_t n_modes);

  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return n_; }
  /// Number of stored (nonnegative-index) spectral coefficients, n/2 + 1.
  std::size_t half_size() const noexcept { return n_ / 2 + 1; }
  std::size_t nyquist() const noexcept { return n_ / 2; }
  double spacing() const noexcept { return length_ / static_cast<double>(n_); }
  double point(std::size_t j) const noexcept { return static_cast<double>(j) * spacing(); }
  std::vector<double> points() const;

  /// kappa_k = 2 pi k / length for a signed index k.
  double wavenumber(long k) const noexcept;
  /// Table for k = -n/2 ... n/2 - 1.
  std::vector<double> wavenumbers() const;
  double max_wavenumber() const noexcept;

  bool operator==(const PeriodicGrid&) const = default;

 private:
  double length_;
  std::size_t n_;
};

PeriodicGrid make_grid(double length, std::size_t n_modes);

/// Real grid function with its discrete Fourier coefficients kept in sync.
///
/// Convention: f(x_j) = sum_k c_k exp(i kappa_k x_j), k = -n/2 ... n/2 - 1,
/// i.e. c_k = (1/n) sum_j f(x_j) exp(-i kappa_k x_j). Only c_0 ... c_{n/2}
/// are stored; c_{-k} = conj(c_k). The entry at n/2 holds the unpaired
/// Nyquist coefficient c_{-n/2}, which is real.
class Field {
 public:
  explicit Field(const PeriodicGrid& grid);

  static Field from_values(const PeriodicGrid& grid, std::vector<double> values);
  static Field from_spectrum(const PeriodicGrid& grid, std::vector<Complex> spectrum);
  template <class F>
  static Field sample(const PeriodicGrid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.point(j));
    return from_values(grid, std::move(v));
  }
  static Field constant(const PeriodicGrid& grid, double c);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const Complex> spectrum() const noexcept { return spectrum_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }

  double max_abs() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double a);
  Field& operator+=(double c);

 private:
  Field(const PeriodicGrid& grid, std::vector<double> values, std::vector<Complex> spectrum);

  PeriodicGrid grid_;
  std::vector<double> values_;
  std::vector<Complex> spectrum_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);
Field operator+(Field f, double c);

// Raw transforms on the stored half spectrum, normalized as above.
std::vector<Complex> forward_transform(std::span<const double> values);
std::vector<double> inverse_transform(std::span<const Complex> spectrum, std::size_t n);

/// Multiplies c_k by m(kappa_k). The Nyquist coefficient is multiplied by
/// m(kappa_{-n/2}), which is well defined because m is even.
Field apply_multiplier(const Field& f, const Symbol& symbol);

/// Spectral d/dx: c_k -> i kappa_k c_k, Nyquist coefficient zeroed.
Field derivative(const Field& f);

/// Bessel potential Lambda^s: c_k -> (1 + kappa_k^2)^(s/2) c_k.
Field bessel_potential(const Field& f, double s);

/// sqrt(length * sum_k (1 + kappa_k^2)^s |c_k|^2); exact for resolved
/// trigonometric polynomials, and the L^2(R) value for a compactly supported
/// field on a long torus.
double sobolev_norm(const Field& f, double s);

/// H^s distance between two fields on the same grid.
double sobolev_distance(const Field& a, const Field& b, double s);

/// Trapezoid quadrature of f * g over the torus.
double inner_product(const Field& f, const Field& g);
double integral(const Field& f);

/// Pointwise product evaluated on a 3/2-padded grid and truncated back, so
/// retained modes carry no aliased energy. Throws GridMismatchError.
Field dealiased_product(const Field& f, const Field& g);

/// g(x) = f(x - a) via c_k -> exp(-i kappa_k a) c_k; the Nyquist coefficient
/// keeps only the real part of its phase factor.
Field shift(const Field& f, double a);

/// Same torus, different mode count: zero padding or spectral truncation.
Field resample(const Field& f, std::size_t n_modes);

}  // namespace whitham
