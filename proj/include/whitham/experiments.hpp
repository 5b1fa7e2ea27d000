#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "whitham/constructions.hpp"
#include "whitham/fitting.hpp"
#include "whitham/solver.hpp"
#include "whitham/symbols.hpp"

namespace whitham {

using Json = nlohmann::ordered_json;

struct Verdict {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string relation;  // how value compares to the threshold, e.g. "<=", ">="
  std::string threshold_key;
  double threshold = 0.0;
};

struct SlopeRecord {
  std::string name;
  SlopeFit fit;
  std::optional<double> target;
};

struct ExperimentReport {
  std::string experiment_id;
  Json params = Json::object();
  std::vector<Json> rows;
  std::vector<SlopeRecord> slopes;
  std::vector<Verdict> verdicts;

  /// Adds a verdict whose threshold is read from params[threshold_key];
  /// throws std::logic_error when the key is missing or not a number.
  const Verdict& add_verdict(const std::string& name, double value, const std::string& relation,
                             const std::string& threshold_key);
  /// Records a boolean check bound to a threshold that is not a simple comparison.
  const Verdict& add_check(const std::string& name, bool passed, double value,
                           const std::string& relation, const std::string& threshold_key);
  const SlopeRecord& add_slope(const std::string& name, const SlopeFit& fit,
                               std::optional<double> target = {});

  bool passed() const;
  const Verdict* find_verdict(const std::string& name) const;
  const SlopeRecord* find_slope(const std::string& name) const;
  Json to_json() const;
};

/// JSON text with every number printed with 17 significant digits. Non-finite
/// numbers become null.
std::string render_json(const Json& doc, int indent = 2);

/// Writes the report document; unless `reproducible`, a "sidecar" object with
/// the wall-clock timestamp is appended.
void write_report(const ExperimentReport& report, const std::filesystem::path& path,
                  bool reproducible);

struct RunOptions {
  int jobs = 1;
  /// Per-instance diagnostics CSV files go here when set.
  std::optional<std::filesystem::path> trajectory_dir;
};

/// Runs fn(0) ... fn(count-1) on up to `jobs` threads; results come back in
/// index order whatever the scheduling. The first exception (by index) is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, int jobs, F&& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  }
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

Json to_json(const SolverConfig& cfg);

SolverConfig periodic_reference_solver();

struct PeriodicNonuniformConfig {
  double s = 2.0;
  std::vector<int> n_list{32, 64, 128, 256};
  double t_star = 1.0;
  int modes_per_n = 16;
  double floor = 0.5;
  double slope_tolerance = 0.05;
  SolverConfig solver = periodic_reference_solver();

  void validate() const;
};

ExperimentReport run_periodic_nonuniform(const Symbol& symbol, const PeriodicNonuniformConfig& cfg,
                                         const RunOptions& opt = {});

struct PeriodicLowregConfig {
  double s = 1.0;
  double sigma = 1.6;
  double eps = 0.1;
  std::vector<int> n_list{64, 128, 256};
  int modes_per_n = 16;
  double floor = 0.5;
  double closed_form_tolerance = 1e-10;
  SolverConfig solver = periodic_reference_solver();

  void validate() const;
};

ExperimentReport run_periodic_lowreg(const Symbol& symbol, const PeriodicLowregConfig& cfg,
                                     const RunOptions& opt = {});

struct LineNonuniformConfig {
  double s = 2.0;
  double delta = 1.5;
  std::vector<double> lambda_list{16, 32, 64};
  double t_star = 0.5;
  double period_factor = 32.0;
  double band_factor = 2.5;
  double floor = 0.5;
  double slope_tolerance = 0.1;
  double boundary_tolerance = 1e-10;
  SolverConfig solver{};

  void validate(const Symbol& symbol) const;
};

ExperimentReport run_line_nonuniform(const Symbol& symbol, const LineNonuniformConfig& cfg,
                                     const RunOptions& opt = {});

struct NormLemmaConfig {
  std::vector<int> n_list{32, 64, 128, 256};
  std::vector<double> sigma_list{0.5, 1.0, 2.0};
  double alpha = 0.3;
  std::vector<double> lambda_list{16, 32, 64, 128, 256};
  double delta = 1.5;
  double s = 2.0;
  double period_factor = 8.0;
  double band_factor = 1.5;
  double sine_tolerance = 5e-3;
  double lemma_tolerance = 0.02;
  double ratio_tolerance = 1e-3;
  double quadrature_tolerance = 1e-10;

  void validate() const;
};

ExperimentReport verify_norm_lemmas(const Symbol& symbol, const NormLemmaConfig& cfg,
                                    const RunOptions& opt = {});

enum class FamilyKind { periodic, line };

struct ErrorDecayConfig {
  FamilyKind family = FamilyKind::periodic;
  double s = 2.0;
  double sigma = 0.0;
  std::vector<int> n_list{8, 16, 32, 64};
  int modes_per_n = 16;
  double omega = 1.0;
  double t = 0.0;
  double slope_tolerance = 0.05;
  double identity_tolerance = 1e-12;
  // line family
  double delta = 1.5;
  std::vector<double> lambda_list{16, 32, 64};
  double period_factor = 32.0;
  double band_factor = 2.5;

  void validate(const Symbol& symbol) const;
};

ExperimentReport verify_error_decay(const Symbol& symbol, const ErrorDecayConfig& cfg,
                                    const RunOptions& opt = {});

struct ScalingConfig {
  double delta = 1.5;
  std::vector<double> lambda_list{16, 32, 64};
  double omega = 1.0;
  double t_max = 1.0;
  double dt = 0.01;
  int monitor_every = 10;
  double period_factor = 32.0;
  std::size_t modes = 1024;
  double slope_margin = 0.15;

  void validate() const;
};

ExperimentReport verify_scaling(const Symbol& symbol, const ScalingConfig& cfg,
                                const RunOptions& opt = {});

struct ConservationConfig {
  std::size_t modes = 2048;
  double amplitude = 1.0;
  double t_end = 1.0;
  double safety = 0.5;
  double s = 2.0;
  double l2_tolerance = 1e-10;
  double hamiltonian_tolerance = 1e-8;
  double mean_tolerance = 1e-13;

  void validate() const;
};

ExperimentReport verify_conservation(const Symbol& symbol, const ConservationConfig& cfg,
                                     const RunOptions& opt = {});

struct GalileanConfig {
  std::size_t modes = 256;
  double omega = 1.0;
  double t_end = 0.5;
  double dt = 1e-3;
  double s = 2.0;
  double discrepancy_tolerance = 1e-8;
  int random_fields = 100;
  std::size_t random_modes = 128;
  std::uint64_t seed = 20240607;
  double skew_tolerance = 1e-12;

  void validate() const;
};

ExperimentReport verify_galilean(const Symbol& symbol, const GalileanConfig& cfg,
                                 const RunOptions& opt = {});

struct SymbolConditionsConfig {
  /// Empty: the built-in panel fkdv:1.5, kdv, whitham.
  std::vector<std::string> symbols;
  double xi_max = 1e3;
  int n_samples = 256;
  double exponent_tolerance = 0.01;
  double evenness_tolerance = 0.0;

  void validate() const;
};

ExperimentReport verify_symbol_conditions(const SymbolConditionsConfig& cfg,
                                          const RunOptions& opt = {});

}  // namespace whitham
