#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace whitham {

enum class SymbolKind { whitham, fkdv, kdv, bo, zero, custom };

/// Even Fourier multiplier symbol m(xi) together with the growth metadata the
/// non-uniformity results are stated in terms of.
///
/// Immutable once built; evaluation is pure and thread-safe. All built-in
/// kinds are evaluated at |xi|, so evenness holds bit-exactly.
class Symbol {
 public:
  /// m(xi) = sqrt(tanh(xi) / xi), with m(0) = 1.
  static Symbol whitham();
  /// m(xi) = |xi|^alpha, alpha >= 0.
  static Symbol fkdv(double alpha);
  /// m(xi) = xi^2.
  static Symbol kdv();
  /// m(xi) = |xi|.
  static Symbol bo();
  /// m = 0, i.e. the inviscid Burgers equation.
  static Symbol zero();
  /// Linear interpolation on a table symmetric about xi = 0. Evaluation
  /// outside the table throws OutOfRangeError; there is no extrapolation.
  static Symbol custom(std::vector<double> xi, std::vector<double> m);
  /// Two-column text file (xi, m(xi)); '#' starts a comment.
  static Symbol custom_from_file(const std::filesystem::path& path);

  /// Parses `whitham`, `kdv`, `bo`, `zero`, `fkdv:<alpha>` or `custom:<path>`.
  static Symbol parse(std::string_view spelling);

  double operator()(double xi) const;
  double eval(double xi) const { return (*this)(xi); }

  SymbolKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  std::string spelling() const;

  /// Declared p with |m(xi)| <~ |xi|^p for large |xi|.
  double growth_exponent() const noexcept { return growth_exponent_; }
  /// Declared gamma of the tail-Lipschitz condition
  /// |m(xi+y) - m(xi)| <= C |y| |xi|^(gamma-1).
  std::optional<double> gamma() const noexcept { return gamma_; }
  /// Declared r with |m(xi)| >~ |xi|^r for large |xi|.
  std::optional<double> lower_exponent() const noexcept { return lower_exponent_; }
  double tail_threshold() const noexcept { return tail_threshold_; }

  /// Copies with overridden metadata (mainly for tabulated symbols).
  Symbol with_growth_exponent(double p) const;
  Symbol with_gamma(std::optional<double> gamma) const;
  Symbol with_lower_exponent(std::optional<double> r) const;
  Symbol with_tail_threshold(double n) const;

  /// Largest |xi| that may be evaluated (infinite for analytic kinds).
  double max_abs_xi() const noexcept;

 private:
  Symbol() = default;

  SymbolKind kind_ = SymbolKind::zero;
  double alpha_ = 0.0;
  double growth_exponent_ = 0.0;
  std::optional<double> gamma_;
  std::optional<double> lower_exponent_;
  double tail_threshold_ = 1.0;
  std::string source_;
  // Nonnegative half of a custom table, increasing in xi.
  std::vector<double> table_xi_;
  std::vector<double> table_m_;
};

/// Outcome of the structural checks on a symbol.
struct ConditionReport {
  double evenness_defect = 0.0;
  // least-squares exponent of log|m| against log|xi| on [N, xi_max]
  double fitted_exponent = 0.0;
  double fit_halfwidth = 0.0;
  std::size_t usable_samples = 0;

  double declared_p = 0.0;
  std::optional<double> declared_gamma;
  std::optional<double> declared_r;
  bool growth_consistent = true;  // fitted <= p (+ tolerance)
  bool lower_consistent = true;   // fitted >= r (- tolerance), when r declared

  double gamma_used = 0.0;
  double tail_constant = 0.0;  // empirical C of the tail-Lipschitz bound
  bool tail_violated = false;  // ratio keeps growing with xi
  double tail_ratio_trend = 0.0;
  bool gamma_outside_range = false;  // gamma >= 2: the line result does not apply

  std::vector<std::string> notes;
};

/// Samples the symbol on [N, xi_max] (log-spaced) and on [-xi_max, xi_max] to
/// check evenness, growth and the tail-Lipschitz condition. The smallness scale
/// for y is probed at 1e-1, 1e-2 and 1e-3 of the local sample spacing.
ConditionReport check_symbol_conditions(const Symbol& symbol, double xi_max,
                                        int n_samples);

}  // namespace whitham
