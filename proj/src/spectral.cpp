#include "whitham/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "whitham/errors.hpp"

namespace whitham {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same_grid(const Field& a, const Field& b, const char* op) {
  if (!(a.grid() == b.grid())) {
    throw GridMismatchError(std::string(op) + ": fields live on different grids");
  }
}

// Half spectrum of length n/2+1 -> half spectrum of length m/2+1, same torus.
std::vector<Complex> change_resolution(std::span<const Complex> c, std::size_t n, std::size_t m) {
  std::vector<Complex> out(m / 2 + 1, Complex{});
  if (m >= n) {
    for (std::size_t k = 0; k < n / 2; ++k) out[k] = c[k];
    // Split the unpaired Nyquist coefficient between +n/2 and -n/2.
    out[n / 2] += (m > n ? 0.5 : 1.0) * c[n / 2];
  } else {
    for (std::size_t k = 0; k < m / 2; ++k) out[k] = c[k];
    out[m / 2] = Complex{2.0 * c[m / 2].real(), 0.0};
  }
  return out;
}

template <class Fn>
Field transform_spectrum(const Field& f, Fn&& fn) {
  std::vector<Complex> c(f.spectrum().begin(), f.spectrum().end());
  const auto& g = f.grid();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= fn(k, g.wavenumber(static_cast<long>(k)));
  return Field::from_spectrum(g, std::move(c));
}

}  // namespace

PeriodicGrid::PeriodicGrid(double length, std::size_t n_modes) : length_(length), n_(n_modes) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError("grid length must be a finite positive number");
  }
  if (n_modes < 8 || !is_power_of_two(n_modes)) {
    throw ConfigError("mode count must be a power of two >= 8, got " + std::to_string(n_modes));
  }
}

std::vector<double> PeriodicGrid::points() const {
  std::vector<double> x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = point(j);
  return x;
}

double PeriodicGrid::wavenumber(long k) const noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / length_;
}

std::vector<double> PeriodicGrid::wavenumbers() const {
  std::vector<double> kappa(n_);
  const long half = static_cast<long>(n_ / 2);
  for (long k = -half; k < half; ++k) kappa[static_cast<std::size_t>(k + half)] = wavenumber(k);
  return kappa;
}

double PeriodicGrid::max_wavenumber() const noexcept {
  return std::numbers::pi * static_cast<double>(n_) / length_;
}

PeriodicGrid make_grid(double length, std::size_t n_modes) { return PeriodicGrid(length, n_modes); }

std::vector<Complex> forward_transform(std::span<const double> values) {
  std::vector<Complex> c(values.size() / 2 + 1);
  detail::fft_r2c(values, c);
  const double inv = 1.0 / static_cast<double>(values.size());
  for (auto& v : c) v *= inv;
  return c;
}

std::vector<double> inverse_transform(std::span<const Complex> spectrum, std::size_t n) {
  std::vector<double> v(n);
  detail::fft_c2r(spectrum, v);
  return v;
}

Field::Field(const PeriodicGrid& grid)
    : grid_(grid), values_(grid.size(), 0.0), spectrum_(grid.half_size(), Complex{}) {}

Field::Field(const PeriodicGrid& grid, std::vector<double> values, std::vector<Complex> spectrum)
    : grid_(grid), values_(std::move(values)), spectrum_(std::move(spectrum)) {}

Field Field::from_values(const PeriodicGrid& grid, std::vector<double> values) {
  if (values.size() != grid.size()) throw ConfigError("value count does not match the grid");
  auto spectrum = forward_transform(values);
  return Field(grid, std::move(values), std::move(spectrum));
}

Field Field::from_spectrum(const PeriodicGrid& grid, std::vector<Complex> spectrum) {
  if (spectrum.size() != grid.half_size()) {
    throw ConfigError("spectrum length does not match the grid");
  }
  // A real field has real zero and Nyquist coefficients.
  spectrum.front().imag(0.0);
  spectrum.back().imag(0.0);
  auto values = inverse_transform(spectrum, grid.size());
  return Field(grid, std::move(values), std::move(spectrum));
}

Field Field::constant(const PeriodicGrid& grid, double c) {
  std::vector<Complex> s(grid.half_size(), Complex{});
  s[0] = c;
  return Field(grid, std::vector<double>(grid.size(), c), std::move(s));
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other, "operator+=");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  for (std::size_t k = 0; k < spectrum_.size(); ++k) spectrum_[k] += other.spectrum_[k];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other, "operator-=");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  for (std::size_t k = 0; k < spectrum_.size(); ++k) spectrum_[k] -= other.spectrum_[k];
  return *this;
}

Field& Field::operator*=(double a) {
  for (auto& v : values_) v *= a;
  for (auto& c : spectrum_) c *= a;
  return *this;
}

Field& Field::operator+=(double c) {
  for (auto& v : values_) v += c;
  spectrum_[0] += c;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double a, Field f) { return f *= a; }
Field operator+(Field f, double c) { return f += c; }

Field apply_multiplier(const Field& f, const Symbol& symbol) {
  return transform_spectrum(f, [&](std::size_t, double kappa) { return Complex{symbol(kappa), 0.0}; });
}

Field derivative(const Field& f) {
  const std::size_t nyq = f.grid().nyquist();
  return transform_spectrum(f, [nyq](std::size_t k, double kappa) {
    return k == nyq ? Complex{} : Complex{0.0, kappa};
  });
}

Field bessel_potential(const Field& f, double s) {
  return transform_spectrum(f, [s](std::size_t, double kappa) {
    return Complex{std::pow(1.0 + kappa * kappa, 0.5 * s), 0.0};
  });
}

double sobolev_norm(const Field& f, double s) {
  const auto c = f.spectrum();
  const auto& g = f.grid();
  const std::size_t nyq = g.nyquist();
  double sum = 0.0;
  for (std::size_t k = 0; k <= nyq; ++k) {
    const double kappa = g.wavenumber(static_cast<long>(k));
    const double weight = (k == 0 || k == nyq) ? 1.0 : 2.0;
    sum += weight * std::pow(1.0 + kappa * kappa, s) * std::norm(c[k]);
  }
  return std::sqrt(g.length() * sum);
}

double sobolev_distance(const Field& a, const Field& b, double s) {
  return sobolev_norm(a - b, s);
}

double inner_product(const Field& f, const Field& g) {
  require_same_grid(f, g, "inner_product");
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) sum += f[j] * g[j];
  return sum * f.grid().spacing();
}

double integral(const Field& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().spacing();
}

Field dealiased_product(const Field& f, const Field& g) {
  require_same_grid(f, g, "dealiased_product");
  const std::size_t n = f.size();
  const std::size_t m = 3 * n / 2;
  const auto fp = inverse_transform(change_resolution(f.spectrum(), n, m), m);
  const auto gp = inverse_transform(change_resolution(g.spectrum(), n, m), m);
  std::vector<double> prod(m);
  for (std::size_t j = 0; j < m; ++j) prod[j] = fp[j] * gp[j];
  const auto padded = forward_transform(prod);
  return Field::from_spectrum(f.grid(), change_resolution(padded, m, n));
}

Field shift(const Field& f, double a) {
  const std::size_t nyq = f.grid().nyquist();
  return transform_spectrum(f, [a, nyq](std::size_t k, double kappa) {
    if (k == nyq) return Complex{std::cos(kappa * a), 0.0};
    return std::polar(1.0, -kappa * a);
  });
}

Field resample(const Field& f, std::size_t n_modes) {
  const PeriodicGrid target(f.grid().length(), n_modes);
  if (n_modes == f.size()) return f;
  return Field::from_spectrum(target, change_resolution(f.spectrum(), f.size(), n_modes));
}

}  // namespace whitham
