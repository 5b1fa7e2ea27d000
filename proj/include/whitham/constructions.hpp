#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "whitham/solver.hpp"
#include "whitham/spectral.hpp"
#include "whitham/symbols.hpp"

namespace whitham {

// Smooth cutoffs. bump is 1 on |x| <= 1 and 0 on |x| >= 2; bump_tilde is 1 on
// |x| <= 2 and 0 on |x| >= 3. Both use the transition g(y) = h(y)/(h(y)+h(1-y))
// with h(y) = exp(-1/y).
double bump_transition(double y);
double bump(double x);
double bump_tilde(double x);
/// L^2(R) norms, by adaptive Gauss-Kronrod quadrature of the transition.
double bump_l2_norm();
double bump_tilde_l2_norm();

/// u = omega/n + n^-s cos(-n m(n) t + n x - omega t) on the 2 pi torus.
struct PeriodicFamilyParams {
  int n = 1;
  double omega = 0.0;
  double s = 2.0;

  void validate() const;
};

/// Two-scale packet on the line, emulated on a torus of length P lambda^delta.
struct LineFamilyParams {
  double lambda = 16.0;
  double delta = 1.5;
  double omega = 1.0;
  double s = 2.0;
  double period_factor = 32.0;

  /// Throws ConfigError; also checks max(1, gamma) < delta when the symbol
  /// declares gamma.
  void validate(const Symbol* symbol = nullptr) const;
  double scale() const;  // lambda^delta
  double torus_length() const { return period_factor * scale(); }
};

Field periodic_approx(const PeriodicFamilyParams& p, const Symbol& symbol, double t,
                      const PeriodicGrid& grid);
Field periodic_approx_dt(const PeriodicFamilyParams& p, const Symbol& symbol, double t,
                         const PeriodicGrid& grid);
/// E = -1/2 n^(1-2s) sin(2 Phi), the exact residual of periodic_approx.
Field periodic_error_exact(const PeriodicFamilyParams& p, const Symbol& symbol, double t,
                           const PeriodicGrid& grid);

/// Smallest power of two >= 8 whose grid on `length` resolves |kappa| <= kappa_needed.
std::size_t modes_for_band(double length, double kappa_needed);
/// Torus of length P lambda^delta resolving band_factor * lambda.
PeriodicGrid line_grid(const LineFamilyParams& p, double band_factor = 2.5);

/// lambda^(-delta/2-s) phi(x/lambda^delta) cos(-lambda m(lambda) t + lambda x - omega t),
/// x measured from the torus center. `use_sine` swaps the carrier to sin.
Field high_freq(const LineFamilyParams& p, const Symbol& symbol, double t,
                const PeriodicGrid& grid, bool use_sine = false);
Field high_freq_dt(const LineFamilyParams& p, const Symbol& symbol, double t,
                   const PeriodicGrid& grid);
/// omega lambda^-1 bump_tilde(x/lambda^delta), x measured from the torus center.
Field low_freq_initial(const LineFamilyParams& p, const PeriodicGrid& grid);

/// max|u| over the outer `fraction` of the torus (both ends, relative to the
/// center) divided by max|u|; 0 for the zero field.
double boundary_ratio(const Field& u, double fraction = 0.1);

/// Same coefficients on a torus `factor` times longer, so g(x) = f(x/factor);
/// optionally zero-padded to `n_modes`. Throws ConfigError if n_modes is smaller
/// than the current mode count.
Field rescale_field(const Field& f, double factor, std::optional<std::size_t> n_modes = {});

/// A field depending on time, optionally with an analytic time derivative.
class TimeFamily {
 public:
  virtual ~TimeFamily() = default;
  virtual const PeriodicGrid& grid() const = 0;
  virtual Field value(double t) const = 0;
  virtual std::optional<Field> time_derivative(double) const { return std::nullopt; }
};

class FunctionFamily : public TimeFamily {
 public:
  using Fn = std::function<Field(double)>;
  FunctionFamily(PeriodicGrid grid, Fn value, Fn derivative = {});

  const PeriodicGrid& grid() const override { return grid_; }
  Field value(double t) const override { return value_(t); }
  std::optional<Field> time_derivative(double t) const override;

 private:
  PeriodicGrid grid_;
  Fn value_;
  Fn derivative_;
};

/// Stored snapshots; value(t) requires t to match a snapshot time.
std::shared_ptr<const TimeFamily> trajectory_family(std::vector<std::pair<double, Field>> snapshots);

class PeriodicFamily : public TimeFamily {
 public:
  PeriodicFamily(PeriodicFamilyParams p, Symbol symbol, PeriodicGrid grid);

  const PeriodicGrid& grid() const override { return grid_; }
  Field value(double t) const override;
  std::optional<Field> time_derivative(double t) const override;

 private:
  PeriodicFamilyParams p_;
  Symbol symbol_;
  PeriodicGrid grid_;
};

/// u^h + u_l with u_l the numerical solution from the low-frequency data.
/// The time derivative is analytic for u^h and the solver right-hand side for u_l.
class LineFamily : public TimeFamily {
 public:
  using LowFrequency = std::function<Field(double)>;

  /// Without `low`, u_l is evolved on a coarse grid of the same torus and
  /// zero-padded onto `grid`.
  LineFamily(LineFamilyParams p, Symbol symbol, PeriodicGrid grid, LowFrequency low = {});

  const PeriodicGrid& grid() const override { return grid_; }
  Field value(double t) const override;
  std::optional<Field> time_derivative(double t) const override;
  Field low_frequency(double t) const { return low_(t); }

 private:
  LineFamilyParams p_;
  Symbol symbol_;
  PeriodicGrid grid_;
  LowFrequency low_;
};

/// u_l(t) from evolving low_freq_initial on `coarse_modes` points of the fine
/// grid's torus and padding the result back onto `fine`.
LineFamily::LowFrequency evolved_low_frequency(const LineFamilyParams& p, const Symbol& symbol,
                                               const PeriodicGrid& fine, std::size_t coarse_modes,
                                               SolverConfig cfg = {});

/// d/dt u + u u_x + L(u_x) at time t. Throws UnsupportedFamilyError when the
/// family has no analytic time derivative.
Field residual(const TimeFamily& u, const Symbol& symbol, double t);

/// v(t, x) = u(lambda^-delta t, lambda^-delta x) on the torus lambda^delta times
/// longer, by exact mode re-indexing.
std::shared_ptr<const TimeFamily> rescale_solution(std::shared_ptr<const TimeFamily> u,
                                                   double lambda, double delta,
                                                   std::optional<std::size_t> n_modes = {});

}  // namespace whitham
