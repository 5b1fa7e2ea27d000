#include "whitham/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "fft.hpp"
#include "whitham/errors.hpp"

namespace whitham {

namespace {

constexpr int kContourPoints = 32;
constexpr double kTaylorRadius = 0.5;

struct Phi {
  Complex p1, p2, p3;
};

// phi_k(z) = sum_j z^j / (j + k)!, k = 1, 2, 3.
Phi phi_taylor(Complex z) {
  Phi out{};
  Complex term = 1.0;  // z^j
  double f1 = 1.0, f2 = 2.0, f3 = 6.0;  // (j+1)!, (j+2)!, (j+3)!
  for (int j = 0; j < 24; ++j) {
    out.p1 += term / f1;
    out.p2 += term / f2;
    out.p3 += term / f3;
    term *= z;
    f1 *= j + 2;
    f2 *= j + 3;
    f3 *= j + 4;
  }
  return out;
}

Phi phi_direct(Complex w) {
  if (std::abs(w) < kTaylorRadius) return phi_taylor(w);
  const Complex e = std::exp(w);
  const Complex w2 = w * w;
  return {(e - 1.0) / w, (e - 1.0 - w) / w2, (e - 1.0 - w - 0.5 * w2) / (w2 * w)};
}

// Cauchy-integral average over a unit circle around z.
Phi phi_functions(Complex z) {
  if (std::abs(z) < kTaylorRadius) return phi_taylor(z);
  Phi acc{};
  for (int j = 0; j < kContourPoints; ++j) {
    const double theta = 2.0 * std::numbers::pi * (j + 0.5) / kContourPoints;
    const Phi p = phi_direct(z + std::polar(1.0, theta));
    acc.p1 += p.p1;
    acc.p2 += p.p2;
    acc.p3 += p.p3;
  }
  const double inv = 1.0 / kContourPoints;
  return {acc.p1 * inv, acc.p2 * inv, acc.p3 * inv};
}

struct Coefficients {
  double dt = 0.0;
  std::vector<Complex> e, e2, q, f1, f2, f3;
};

bool all_finite(std::span<const Complex> c) {
  return std::all_of(c.begin(), c.end(),
                     [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

}  // namespace

struct EtdRk4::Impl {
  PeriodicGrid grid;
  std::size_t n, half, padded;
  std::vector<Complex> linear;     // -i kappa m(kappa)
  std::vector<Complex> flux_mult;  // -i kappa / 2
  std::vector<Coefficients> cache;

  Impl(const PeriodicGrid& g, const Symbol& symbol)
      : grid(g), n(g.size()), half(g.half_size()), padded(3 * g.size() / 2) {
    linear.resize(half);
    flux_mult.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
      const double kappa = grid.wavenumber(static_cast<long>(k));
      const bool nyq = k == grid.nyquist();
      linear[k] = nyq ? Complex{} : Complex{0.0, -kappa * symbol(kappa)};
      flux_mult[k] = nyq ? Complex{} : Complex{0.0, -0.5 * kappa};
    }
  }

  const Coefficients& coefficients(double dt) {
    for (const auto& c : cache) {
      if (c.dt == dt) return c;
    }
    Coefficients c;
    c.dt = dt;
    for (auto* v : {&c.e, &c.e2, &c.q, &c.f1, &c.f2, &c.f3}) v->resize(half);
    for (std::size_t k = 0; k < half; ++k) {
      const Complex z = dt * linear[k];
      const Phi full = phi_functions(z);
      const Phi halfstep = phi_functions(0.5 * z);
      c.e[k] = std::exp(z);
      c.e2[k] = std::exp(0.5 * z);
      c.q[k] = 0.5 * dt * halfstep.p1;
      c.f1[k] = dt * (full.p1 - 3.0 * full.p2 + 4.0 * full.p3);
      c.f2[k] = dt * (full.p2 - 2.0 * full.p3);
      c.f3[k] = dt * (-full.p2 + 4.0 * full.p3);
    }
    if (cache.size() >= 3) cache.erase(cache.begin());
    cache.push_back(std::move(c));
    return cache.back();
  }

  // -(u^2/2)_x with the square formed on the 3/2 grid.
  void nonlinear(std::span<const Complex> v, std::vector<Complex>& out) const {
    std::vector<Complex> pad(padded / 2 + 1, Complex{});
    std::copy(v.begin(), v.begin() + static_cast<long>(half - 1), pad.begin());
    pad[half - 1] = 0.5 * v[half - 1];
    std::vector<double> phys(padded);
    detail::fft_c2r(pad, phys);
    for (auto& x : phys) x *= x;
    detail::fft_r2c(phys, pad);
    const double inv = 1.0 / static_cast<double>(padded);
    out.resize(half);
    for (std::size_t k = 0; k < half; ++k) out[k] = flux_mult[k] * pad[k] * inv;
  }

  void advance(std::vector<Complex>& v, double dt) {
    const Coefficients& c = coefficients(dt);
    std::vector<Complex> nv, na, nb, nc;
    std::vector<Complex> a(half), b(half), cc(half);
    nonlinear(v, nv);
    for (std::size_t k = 0; k < half; ++k) a[k] = c.e2[k] * v[k] + c.q[k] * nv[k];
    nonlinear(a, na);
    for (std::size_t k = 0; k < half; ++k) b[k] = c.e2[k] * v[k] + c.q[k] * na[k];
    nonlinear(b, nb);
    for (std::size_t k = 0; k < half; ++k) cc[k] = c.e2[k] * a[k] + c.q[k] * (2.0 * nb[k] - nv[k]);
    nonlinear(cc, nc);
    for (std::size_t k = 0; k < half; ++k) {
      v[k] = c.e[k] * v[k] + c.f1[k] * nv[k] + 2.0 * c.f2[k] * (na[k] + nb[k]) + c.f3[k] * nc[k];
    }
    v.front().imag(0.0);
    v.back().imag(0.0);
  }
};

EtdRk4::EtdRk4(const PeriodicGrid& grid, const Symbol& symbol)
    : impl_(std::make_unique<Impl>(grid, symbol)) {}
EtdRk4::~EtdRk4() = default;
EtdRk4::EtdRk4(EtdRk4&&) noexcept = default;
EtdRk4& EtdRk4::operator=(EtdRk4&&) noexcept = default;

const PeriodicGrid& EtdRk4::grid() const noexcept { return impl_->grid; }

void EtdRk4::advance(std::vector<Complex>& spectrum, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (spectrum.size() != impl_->half) throw ConfigError("spectrum length does not match the grid");
  impl_->advance(spectrum, dt);
}

std::vector<Complex> EtdRk4::rhs(std::span<const Complex> spectrum) const {
  std::vector<Complex> out;
  impl_->nonlinear(spectrum, out);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += impl_->linear[k] * spectrum[k];
  return out;
}

void SolverConfig::validate() const {
  if (const auto* f = std::get_if<FixedStep>(&dt_policy)) {
    if (!(f->dt > 0.0) || !std::isfinite(f->dt)) throw ConfigError("fixed dt must be positive");
  } else {
    const double safety = std::get<CflStep>(dt_policy).safety;
    if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("CFL safety must lie in (0, 1]");
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be nonnegative");
  if (monitor_every < 1) throw ConfigError("monitor_every must be >= 1");
  if (!(blowup_threshold > 0.0)) throw ConfigError("blow-up threshold must be positive");
  if (!(max_dt > 0.0)) throw ConfigError("max_dt must be positive");
  if (!(min_dt > 0.0)) throw ConfigError("min_dt must be positive");
}

void Diagnostics::write_csv(std::ostream& out) const {
  out << "t,mean,l2,hamiltonian,hs_norm\n";
  char buf[160];
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", times[i], mean[i], l2[i],
                  hamiltonian[i], hs_norm[i]);
    out << buf;
  }
}

void Diagnostics::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write_csv(out);
}

Field step(const Field& u, double dt, const Symbol& symbol) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  EtdRk4 integrator(u.grid(), symbol);
  std::vector<Complex> v(u.spectrum().begin(), u.spectrum().end());
  integrator.advance(v, dt);
  if (!all_finite(v)) throw BlowupError("non-finite values after one step", 0.0);
  return Field::from_spectrum(u.grid(), std::move(v));
}

Field evolution_rhs(const Field& u, const Symbol& symbol) {
  const Field ux = derivative(u);
  Field out = dealiased_product(u, ux) + apply_multiplier(ux, symbol);
  out *= -1.0;
  return out;
}

Conserved conserved_quantities(const Field& u, const Symbol& symbol) {
  const auto& g = u.grid();
  const auto c = u.spectrum();
  const std::size_t nyq = g.nyquist();
  Conserved q;
  q.mean = g.length() * c[0].real();
  double l2 = 0.0, ulu = 0.0;
  for (std::size_t k = 0; k <= nyq; ++k) {
    const double w = (k == 0 || k == nyq) ? 1.0 : 2.0;
    const double e = w * std::norm(c[k]);
    l2 += e;
    ulu += symbol(g.wavenumber(static_cast<long>(k))) * e;
  }
  q.l2 = g.length() * l2;
  // Trapezoid of u^3 on a doubled grid is exact for the band-limited field.
  const Field fine = resample(u, 2 * g.size());
  double cube = 0.0;
  for (double v : fine.values()) cube += v * v * v;
  cube *= fine.grid().spacing();
  q.hamiltonian = 0.5 * g.length() * ulu + cube / 6.0;
  return q;
}

double riccati_bound(double norm0, double c, double t) {
  const double denom = 1.0 - t * c * norm0;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return norm0 / denom;
}

std::optional<double> fit_cs(const Diagnostics& diag) {
  std::size_t usable = 0;
  for (double h : diag.hs_norm) usable += std::isfinite(h) ? 1 : 0;
  if (diag.size() < 2 || usable < 2 || !std::isfinite(diag.hs_norm.front())) {
    throw InsufficientDataError("fit_cs needs at least two snapshots with finite norms");
  }
  const double h0 = diag.hs_norm.front();
  const double t0 = diag.times.front();
  double c = 0.0;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    const double h = diag.hs_norm[i];
    if (!std::isfinite(h) || h <= h0 * (1.0 + 1e-12)) continue;
    const double tau = diag.times[i] - t0;
    if (!(tau > 0.0) || h0 <= 0.0) return std::nullopt;
    // riccati_bound(h0, c, tau) >= h  <=>  c >= (1 - h0/h) / (tau h0)
    c = std::max(c, (1.0 - h0 / h) / (tau * h0));
  }
  return c;
}

EvolveResult evolve(const Field& u0, const Symbol& symbol, const SolverConfig& cfg, double s,
                    const SnapshotObserver& observer) {
  cfg.validate();
  const PeriodicGrid& grid = u0.grid();
  EtdRk4 integrator(grid, symbol);

  EvolveResult result{u0, Diagnostics{}, RunStatus::completed, 0.0, 0};
  Diagnostics& diag = result.diagnostics;
  diag.s = s;

  std::vector<Complex> state(u0.spectrum().begin(), u0.spectrum().end());

  auto snapshot = [&](double t) {
    Field f = Field::from_spectrum(grid, state);
    const Conserved q = conserved_quantities(f, symbol);
    diag.times.push_back(t);
    diag.mean.push_back(q.mean);
    diag.l2.push_back(q.l2);
    diag.hamiltonian.push_back(q.hamiltonian);
    diag.hs_norm.push_back(sobolev_norm(f, s));
    if (observer) observer(t, f);
    result.final = std::move(f);
  };

  const auto* fixed = std::get_if<FixedStep>(&cfg.dt_policy);
  const double kappa_max = grid.max_wavenumber();
  const double end_tol = 1e-12 * std::max(1.0, cfg.t_end);

  // A fixed step that divides t_end (to rounding) is applied exactly that many times.
  long fixed_steps = -1;
  double fixed_dt = 0.0;
  if (fixed) {
    const double ratio = cfg.t_end / fixed->dt;
    const double rounded = std::round(ratio);
    if (rounded >= 1.0 && std::abs(ratio - rounded) < 1e-9 * rounded) {
      fixed_steps = static_cast<long>(rounded);
      fixed_dt = cfg.t_end / rounded;
    } else {
      fixed_dt = fixed->dt;
    }
  }

  double t = 0.0;
  double current_dt = 0.0;
  long since_snapshot = 0;
  snapshot(0.0);

  while (cfg.t_end - t > end_tol && (fixed_steps < 0 || result.steps < fixed_steps)) {
    const auto values = inverse_transform(state, grid.size());
    double umax = 0.0;
    for (double v : values) umax = std::max(umax, std::abs(v));

    std::vector<Complex> ds(state);
    for (std::size_t k = 0; k < ds.size(); ++k) {
      ds[k] *= k == grid.nyquist() ? Complex{} : Complex{0.0, grid.wavenumber(static_cast<long>(k))};
    }
    const auto slope = inverse_transform(ds, grid.size());
    double slope_max = 0.0;
    for (double v : slope) slope_max = std::max(slope_max, std::abs(v));
    if (!(slope_max <= cfg.blowup_threshold)) {
      result.status = RunStatus::blowup;
      break;
    }

    double dt = 0.0;
    if (fixed) {
      dt = fixed_dt;
    } else {
      const double safety = std::get<CflStep>(cfg.dt_policy).safety;
      const double cfl = umax > 0.0 ? safety / (kappa_max * umax) : cfg.max_dt;
      const double target = std::min(cfl, cfg.max_dt);
      // Recompute the exponential coefficients only on a significant change.
      if (current_dt == 0.0 || current_dt > target || current_dt < target / 1.3) {
        current_dt = cfl >= cfg.max_dt ? cfg.max_dt : 0.9 * target;
      }
      dt = current_dt;
    }
    if (dt < cfg.min_dt) {
      result.status = RunStatus::step_underflow;
      break;
    }
    if (fixed_steps < 0) dt = std::min(dt, cfg.t_end - t);

    std::vector<Complex> previous = state;
    integrator.advance(state, dt);
    if (!all_finite(state)) {
      state = std::move(previous);
      result.status = RunStatus::blowup;
      break;
    }
    ++result.steps;
    t = fixed_steps > 0 ? fixed_dt * static_cast<double>(result.steps) : t + dt;
    if (++since_snapshot >= cfg.monitor_every) {
      snapshot(t);
      since_snapshot = 0;
    }
  }

  if (since_snapshot != 0 || result.status != RunStatus::completed) {
    if (diag.times.back() != t) snapshot(t);
  }
  result.stop_time = t;
  if (diag.size() >= 2) {
    try {
      diag.fitted_cs = fit_cs(diag);
    } catch (const InsufficientDataError&) {
      diag.fitted_cs.reset();
    }
  }
  return result;
}

}  // namespace whitham
