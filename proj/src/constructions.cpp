#include "whitham/constructions.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "whitham/errors.hpp"

namespace whitham {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double h(double y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; }

double transition_squared_integral() {
  using boost::math::quadrature::gauss_kronrod;
  static const double value = gauss_kronrod<double, 61>::integrate(
      [](double y) {
        const double g = bump_transition(y);
        return g * g;
      },
      0.0, 1.0, 15, 1e-15);
  return value;
}

void require_two_pi_torus(const PeriodicGrid& grid) {
  if (std::abs(grid.length() - two_pi) > 1e-9 * two_pi) {
    throw ConfigError("the periodic family lives on the torus of length 2 pi");
  }
}

void require_resolved(const PeriodicGrid& grid, int frequency, const char* what) {
  // The doubled frequency 2n produced by the quadratic term must stay below Nyquist.
  if (2 * static_cast<std::size_t>(frequency) >= grid.size() / 2) {
    throw ConfigError(std::string(what) + ": frequency " + std::to_string(frequency) +
                      " is not resolved with dealiasing headroom on " +
                      std::to_string(grid.size()) + " points");
  }
}

// Samples f(Phi * harmonic) at the collocation points, where Phi is the family
// phase. The spatial part harmonic*n*x_j is reduced modulo 2 pi in integer
// arithmetic so large frequencies do not lose digits.
template <class F>
Field sample_phase(const PeriodicFamilyParams& p, const Symbol& symbol, double t,
                   const PeriodicGrid& grid, int harmonic, double offset, double amp, F&& f) {
  const std::size_t n_pts = grid.size();
  const std::size_t freq = static_cast<std::size_t>(harmonic) * static_cast<std::size_t>(p.n);
  const double temporal = -harmonic * (p.n * symbol(p.n) + p.omega) * t;
  std::vector<double> v(n_pts);
  for (std::size_t j = 0; j < n_pts; ++j) {
    const double spatial = two_pi * static_cast<double>((freq * j) % n_pts) / static_cast<double>(n_pts);
    v[j] = amp * f(spatial + temporal);
  }
  // The constant goes straight into the zero mode; summing it into the samples
  // first would leak its rounding into the carrier coefficient.
  return Field::from_values(grid, std::move(v)) + offset;
}

void require_line_grid(const LineFamilyParams& p, const PeriodicGrid& grid, double kappa_factor) {
  if (grid.length() < 8.0 * p.scale() * (1.0 - 1e-12)) {
    throw ConfigError("torus of length " + std::to_string(grid.length()) +
                      " is too short for a packet of scale " + std::to_string(p.scale()));
  }
  if (grid.max_wavenumber() < kappa_factor * p.lambda) {
    throw ConfigError("grid does not resolve the carrier frequency " + std::to_string(p.lambda));
  }
}

double centered(const PeriodicGrid& grid, std::size_t j) {
  return grid.point(j) - 0.5 * grid.length();
}

double line_phase(const LineFamilyParams& p, const Symbol& symbol, double t, double x) {
  return -p.lambda * symbol(p.lambda) * t + p.lambda * x - p.omega * t;
}

}  // namespace

double bump_transition(double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  const double a = h(y);
  return a / (a + h(1.0 - y));
}

double bump(double x) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return 1.0;
  if (ax >= 2.0) return 0.0;
  return bump_transition(2.0 - ax);
}

double bump_tilde(double x) {
  const double ax = std::abs(x);
  if (ax <= 2.0) return 1.0;
  if (ax >= 3.0) return 0.0;
  return bump_transition(3.0 - ax);
}

double bump_l2_norm() { return std::sqrt(2.0 * (1.0 + transition_squared_integral())); }

double bump_tilde_l2_norm() { return std::sqrt(2.0 * (2.0 + transition_squared_integral())); }

void PeriodicFamilyParams::validate() const {
  if (n < 1) throw ConfigError("family frequency n must be >= 1");
  if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("Sobolev index s must be positive");
  if (!std::isfinite(omega)) throw ConfigError("omega must be finite");
}

void LineFamilyParams::validate(const Symbol* symbol) const {
  if (!(lambda >= 1.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 1");
  if (!(delta > 1.0 && delta < 2.0)) throw ConfigError("delta must lie in (1, 2)");
  if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("Sobolev index s must be positive");
  if (!std::isfinite(omega)) throw ConfigError("omega must be finite");
  if (!(period_factor >= 8.0)) throw ConfigError("period factor must be >= 8");
  if (symbol && symbol->gamma() && !(delta > std::max(1.0, *symbol->gamma()))) {
    throw ConfigError("delta must exceed max(1, gamma) = " +
                      std::to_string(std::max(1.0, *symbol->gamma())));
  }
}

double LineFamilyParams::scale() const { return std::pow(lambda, delta); }

Field periodic_approx(const PeriodicFamilyParams& p, const Symbol& symbol, double t,
                      const PeriodicGrid& grid) {
  p.validate();
  require_two_pi_torus(grid);
  require_resolved(grid, p.n, "periodic_approx");
  return sample_phase(p, symbol, t, grid, 1, p.omega / p.n, std::pow(p.n, -p.s),
                      [](double ph) { return std::cos(ph); });
}

Field periodic_approx_dt(const PeriodicFamilyParams& p, const Symbol& symbol, double t,
                         const PeriodicGrid& grid) {
  p.validate();
  require_two_pi_torus(grid);
  require_resolved(grid, p.n, "periodic_approx_dt");
  const double amp = std::pow(p.n, -p.s) * (p.n * symbol(p.n) + p.omega);
  return sample_phase(p, symbol, t, grid, 1, 0.0, amp, [](double ph) { return std::sin(ph); });
}

Field periodic_error_exact(const PeriodicFamilyParams& p, const Symbol& symbol, double t,
                           const PeriodicGrid& grid) {
  p.validate();
  require_two_pi_torus(grid);
  require_resolved(grid, p.n, "periodic_error_exact");
  const double amp = -0.5 * std::pow(p.n, 1.0 - 2.0 * p.s);
  return sample_phase(p, symbol, t, grid, 2, 0.0, amp, [](double ph) { return std::sin(ph); });
}

std::size_t modes_for_band(double length, double kappa_needed) {
  std::size_t n = 8;
  while (std::numbers::pi * static_cast<double>(n) / length < kappa_needed) n *= 2;
  return n;
}

PeriodicGrid line_grid(const LineFamilyParams& p, double band_factor) {
  p.validate();
  const double length = p.torus_length();
  return PeriodicGrid(length, modes_for_band(length, band_factor * p.lambda));
}

Field high_freq(const LineFamilyParams& p, const Symbol& symbol, double t,
                const PeriodicGrid& grid, bool use_sine) {
  p.validate();
  require_line_grid(p, grid, 1.5);
  const double amp = std::pow(p.lambda, -0.5 * p.delta - p.s);
  const double inv_scale = 1.0 / p.scale();
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double x = centered(grid, j);
    const double env = bump(x * inv_scale);
    if (env == 0.0) continue;
    const double ph = line_phase(p, symbol, t, x);
    v[j] = amp * env * (use_sine ? std::sin(ph) : std::cos(ph));
  }
  return Field::from_values(grid, std::move(v));
}

Field high_freq_dt(const LineFamilyParams& p, const Symbol& symbol, double t,
                   const PeriodicGrid& grid) {
  p.validate();
  require_line_grid(p, grid, 1.5);
  const double amp = std::pow(p.lambda, -0.5 * p.delta - p.s) *
                     (p.lambda * symbol(p.lambda) + p.omega);
  const double inv_scale = 1.0 / p.scale();
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double x = centered(grid, j);
    const double env = bump(x * inv_scale);
    if (env == 0.0) continue;
    v[j] = amp * env * std::sin(line_phase(p, symbol, t, x));
  }
  return Field::from_values(grid, std::move(v));
}

Field low_freq_initial(const LineFamilyParams& p, const PeriodicGrid& grid) {
  p.validate();
  if (grid.length() < 8.0 * p.scale() * (1.0 - 1e-12)) {
    throw ConfigError("torus is too short for the low-frequency profile");
  }
  const double amp = p.omega / p.lambda;
  const double inv_scale = 1.0 / p.scale();
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = amp * bump_tilde(centered(grid, j) * inv_scale);
  return Field::from_values(grid, std::move(v));
}

double boundary_ratio(const Field& u, double fraction) {
  const auto& g = u.grid();
  const double cut = (0.5 - fraction) * g.length();
  double outer = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (std::abs(centered(g, j)) >= cut) outer = std::max(outer, std::abs(u[j]));
  }
  const double total = u.max_abs();
  return total > 0.0 ? outer / total : 0.0;
}

Field rescale_field(const Field& f, double factor, std::optional<std::size_t> n_modes) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw ConfigError("rescale factor must be positive");
  if (n_modes && *n_modes < f.size()) {
    throw ConfigError("target grid has fewer modes than the source field");
  }
  const PeriodicGrid longer(f.grid().length() * factor, f.size());
  auto g = Field::from_spectrum(longer, {f.spectrum().begin(), f.spectrum().end()});
  return n_modes ? resample(g, *n_modes) : g;
}

FunctionFamily::FunctionFamily(PeriodicGrid grid, Fn value, Fn derivative)
    : grid_(std::move(grid)), value_(std::move(value)), derivative_(std::move(derivative)) {}

std::optional<Field> FunctionFamily::time_derivative(double t) const {
  if (!derivative_) return std::nullopt;
  return derivative_(t);
}

std::shared_ptr<const TimeFamily> trajectory_family(std::vector<std::pair<double, Field>> snapshots) {
  if (snapshots.empty()) throw ConfigError("trajectory needs at least one snapshot");
  std::sort(snapshots.begin(), snapshots.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto grid = snapshots.front().second.grid();
  auto data = std::make_shared<const std::vector<std::pair<double, Field>>>(std::move(snapshots));
  return std::make_shared<FunctionFamily>(grid, [data](double t) {
    for (const auto& [ts, f] : *data) {
      if (std::abs(ts - t) <= 1e-9 * std::max(1.0, std::abs(t))) return f;
    }
    throw OutOfRangeError("no snapshot at t = " + std::to_string(t));
  });
}

PeriodicFamily::PeriodicFamily(PeriodicFamilyParams p, Symbol symbol, PeriodicGrid grid)
    : p_(p), symbol_(std::move(symbol)), grid_(std::move(grid)) {
  p_.validate();
  require_two_pi_torus(grid_);
  require_resolved(grid_, p_.n, "PeriodicFamily");
}

Field PeriodicFamily::value(double t) const { return periodic_approx(p_, symbol_, t, grid_); }

std::optional<Field> PeriodicFamily::time_derivative(double t) const {
  return periodic_approx_dt(p_, symbol_, t, grid_);
}

LineFamily::LineFamily(LineFamilyParams p, Symbol symbol, PeriodicGrid grid, LowFrequency low)
    : p_(p), symbol_(std::move(symbol)), grid_(std::move(grid)), low_(std::move(low)) {
  p_.validate(&symbol_);
  require_line_grid(p_, grid_, 1.5);
  if (!low_) {
    const std::size_t coarse = std::min(grid_.size(), modes_for_band(grid_.length(), 100.0 / p_.scale()));
    low_ = evolved_low_frequency(p_, symbol_, grid_, coarse);
  }
}

Field LineFamily::value(double t) const { return high_freq(p_, symbol_, t, grid_) + low_(t); }

std::optional<Field> LineFamily::time_derivative(double t) const {
  return high_freq_dt(p_, symbol_, t, grid_) + evolution_rhs(low_(t), symbol_);
}

LineFamily::LowFrequency evolved_low_frequency(const LineFamilyParams& p, const Symbol& symbol,
                                               const PeriodicGrid& fine, std::size_t coarse_modes,
                                               SolverConfig cfg) {
  if (coarse_modes > fine.size()) throw ConfigError("coarse grid is finer than the target grid");
  const PeriodicGrid coarse(fine.length(), coarse_modes);
  auto u0 = low_freq_initial(p, coarse);
  const std::size_t n_fine = fine.size();
  return [u0 = std::move(u0), symbol, cfg, n_fine](double t) mutable {
    if (t == 0.0) return resample(u0, n_fine);
    auto run_cfg = cfg;
    run_cfg.t_end = t;
    run_cfg.monitor_every = 1 << 30;
    auto r = evolve(u0, symbol, run_cfg, 0.0);
    if (r.status != RunStatus::completed) {
      throw BlowupError("low-frequency solution broke down", r.stop_time);
    }
    return resample(r.final, n_fine);
  };
}

Field residual(const TimeFamily& u, const Symbol& symbol, double t) {
  auto dt = u.time_derivative(t);
  if (!dt) throw UnsupportedFamilyError("family has no analytic time derivative");
  const auto v = u.value(t);
  const auto vx = derivative(v);
  return *dt + dealiased_product(v, vx) + apply_multiplier(vx, symbol);
}

std::shared_ptr<const TimeFamily> rescale_solution(std::shared_ptr<const TimeFamily> u,
                                                   double lambda, double delta,
                                                   std::optional<std::size_t> n_modes) {
  if (!(lambda >= 1.0)) throw ConfigError("lambda must be >= 1");
  const double factor = std::pow(lambda, delta);
  const auto& base = u->grid();
  const std::size_t modes = n_modes.value_or(base.size());
  if (modes < base.size()) throw ConfigError("target grid has fewer modes than the source field");
  PeriodicGrid grid(base.length() * factor, modes);
  auto value = [u, factor, modes](double t) {
    return rescale_field(u->value(t / factor), factor, modes);
  };
  auto deriv = [u, factor, modes](double t) {
    auto d = u->time_derivative(t / factor);
    if (!d) throw UnsupportedFamilyError("rescaled family has no analytic time derivative");
    return (1.0 / factor) * rescale_field(*d, factor, modes);
  };
  return std::make_shared<FunctionFamily>(std::move(grid), std::move(value), std::move(deriv));
}

}  // namespace whitham
