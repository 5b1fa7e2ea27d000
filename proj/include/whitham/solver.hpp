#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "whitham/spectral.hpp"
#include "whitham/symbols.hpp"

namespace whitham {

struct FixedStep {
  double dt = 1e-3;
};

/// dt = safety / (kappa_max * max|u|), capped by SolverConfig::max_dt.
struct CflStep {
  double safety = 0.5;
};

struct SolverConfig {
  std::variant<FixedStep, CflStep> dt_policy = CflStep{};
  double t_end = 1.0;
  int monitor_every = 10;
  double blowup_threshold = 1e6;
  double max_dt = 0.05;
  double min_dt = 1e-12;

  /// Throws ConfigError.
  void validate() const;
};

struct Diagnostics {
  double s = 2.0;
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> l2;
  std::vector<double> hamiltonian;
  std::vector<double> hs_norm;
  std::optional<double> fitted_cs;

  std::size_t size() const noexcept { return times.size(); }
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
};

enum class RunStatus { completed, blowup, step_underflow };

struct EvolveResult {
  Field final;
  Diagnostics diagnostics;
  RunStatus status = RunStatus::completed;
  /// Time at which the run stopped early; equals the final time otherwise.
  double stop_time = 0.0;
  long steps = 0;
};

/// Called with every diagnostic snapshot, including t = 0 and the final state.
using SnapshotObserver = std::function<void(double t, const Field& u)>;

struct Conserved {
  double mean = 0.0;
  double l2 = 0.0;
  double hamiltonian = 0.0;
};

/// Fourth-order exponential time differencing Runge-Kutta integrator for
///   u_t = -L(u_x) - (u^2/2)_x
/// on a periodic grid. The linear part, with multiplier -i kappa m(kappa), is
/// integrated exactly; the nonlinear flux is formed with 3/2 dealiasing.
/// State is the stored half spectrum.
class EtdRk4 {
 public:
  EtdRk4(const PeriodicGrid& grid, const Symbol& symbol);
  ~EtdRk4();
  EtdRk4(EtdRk4&&) noexcept;
  EtdRk4& operator=(EtdRk4&&) noexcept;

  const PeriodicGrid& grid() const noexcept;
  void advance(std::vector<Complex>& spectrum, double dt);
  /// Spectral right-hand side -L(u_x) - (u^2/2)_x.
  std::vector<Complex> rhs(std::span<const Complex> spectrum) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One step of the integrator. Throws BlowupError on non-finite output.
Field step(const Field& u, double dt, const Symbol& symbol);

/// Right-hand side -u u_x - L(u_x) as a field.
Field evolution_rhs(const Field& u, const Symbol& symbol);

/// Integrates to cfg.t_end, recording diagnostics every cfg.monitor_every
/// steps. Blow-up (max|u_x| above the threshold or non-finite values) and step
/// underflow end the run early with partial diagnostics.
EvolveResult evolve(const Field& u0, const Symbol& symbol, const SolverConfig& cfg, double s,
                    const SnapshotObserver& observer = {});

/// Mean, integral of u^2 and the Hamiltonian 1/2 int u L(u) + 1/6 int u^3,
/// all evaluated exactly for the band-limited grid function.
Conserved conserved_quantities(const Field& u, const Symbol& symbol);

/// norm0 / (1 - t c norm0), or +infinity once t c norm0 >= 1.
double riccati_bound(double norm0, double c, double t);

/// Smallest c >= 0 with hs_norm[i] <= riccati_bound(hs_norm[0], c, t_i - t_0)
/// for every snapshot; nullopt when no c works (norm jump at t = 0+).
/// Throws InsufficientDataError for fewer than two usable snapshots.
std::optional<double> fit_cs(const Diagnostics& diag);

}  // namespace whitham
