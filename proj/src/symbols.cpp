#include "whitham/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "whitham/errors.hpp"
#include "whitham/fitting.hpp"

namespace whitham {

namespace {

// tanh(x)/x for small x: 1 - x^2/3 + 2x^4/15 - 17x^6/315.
double tanh_ratio_series(double x) {
  const double x2 = x * x;
  return 1.0 + x2 * (-1.0 / 3.0 + x2 * (2.0 / 15.0 - x2 * (17.0 / 315.0)));
}

double whitham_symbol(double xi) {
  const double x = std::abs(xi);
  if (x < 1e-4) return std::sqrt(tanh_ratio_series(x));
  return std::sqrt(std::tanh(x) / x);
}

double parse_double(std::string_view text, std::string_view what) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + std::string(what) + " from '" + s + "'");
  }
  if (used != s.size()) {
    throw ConfigError("trailing characters in " + std::string(what) + " '" + s + "'");
  }
  return v;
}

}  // namespace

Symbol Symbol::whitham() {
  Symbol m;
  m.kind_ = SymbolKind::whitham;
  m.growth_exponent_ = 0.0;
  m.gamma_ = 0.0;
  return m;
}

Symbol Symbol::fkdv(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("fkdv exponent must be a finite nonnegative real");
  }
  Symbol m;
  m.kind_ = SymbolKind::fkdv;
  m.alpha_ = alpha;
  m.growth_exponent_ = alpha;
  m.gamma_ = alpha;
  m.lower_exponent_ = alpha;
  return m;
}

Symbol Symbol::kdv() {
  Symbol m = fkdv(2.0);
  m.kind_ = SymbolKind::kdv;
  return m;
}

Symbol Symbol::bo() {
  Symbol m = fkdv(1.0);
  m.kind_ = SymbolKind::bo;
  return m;
}

Symbol Symbol::zero() {
  Symbol m;
  m.kind_ = SymbolKind::zero;
  m.growth_exponent_ = 0.0;
  m.gamma_ = 0.0;
  return m;
}

Symbol Symbol::custom(std::vector<double> xi, std::vector<double> values) {
  if (xi.size() != values.size()) throw ConfigError("custom symbol: column length mismatch");
  if (xi.size() < 2) throw ConfigError("custom symbol: need at least two samples");
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (!std::isfinite(xi[i]) || !std::isfinite(values[i])) {
      throw ConfigError("custom symbol: non-finite table entry");
    }
    if (i > 0 && !(xi[i] > xi[i - 1])) {
      throw ConfigError("custom symbol: xi must be strictly increasing");
    }
  }

  Symbol m;
  m.kind_ = SymbolKind::custom;
  if (xi.front() < 0.0) {
    // Two-sided table: it must be mirror symmetric.
    const std::size_t n = xi.size();
    const double scale = std::max(std::abs(xi.front()), std::abs(xi.back()));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = n - 1 - i;
      const double vscale = std::max({1.0, std::abs(values[i]), std::abs(values[j])});
      if (std::abs(xi[i] + xi[j]) > 1e-12 * scale ||
          std::abs(values[i] - values[j]) > 1e-12 * vscale) {
        throw ConfigError("custom symbol: table is not even about xi = 0");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (xi[i] >= 0.0) {
        m.table_xi_.push_back(std::abs(xi[i]));
        m.table_m_.push_back(values[i]);
      }
    }
    if (m.table_xi_.front() != 0.0) {
      // Odd sample count straddles zero; insert the midpoint sample.
      const std::size_t mid = n / 2;
      const double v0 = values[mid - 1] +
                        (values[mid] - values[mid - 1]) * (0.0 - xi[mid - 1]) /
                            (xi[mid] - xi[mid - 1]);
      m.table_xi_.insert(m.table_xi_.begin(), 0.0);
      m.table_m_.insert(m.table_m_.begin(), v0);
    }
  } else {
    m.table_xi_ = std::move(xi);
    m.table_m_ = std::move(values);
  }
  if (m.table_xi_.size() < 2) throw ConfigError("custom symbol: table too short");
  m.growth_exponent_ = 0.0;
  return m;
}

Symbol Symbol::custom_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open symbol table '" + path.string() + "'");
  std::vector<double> xi, values;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a)) continue;
    if (!(row >> b)) throw ConfigError("symbol table: expected two columns in '" + line + "'");
    xi.push_back(a);
    values.push_back(b);
  }
  Symbol m = custom(std::move(xi), std::move(values));
  m.source_ = path.string();
  return m;
}

Symbol Symbol::parse(std::string_view spelling) {
  if (spelling == "whitham") return whitham();
  if (spelling == "kdv") return kdv();
  if (spelling == "bo") return bo();
  if (spelling == "zero") return zero();
  if (spelling.starts_with("fkdv:")) {
    return fkdv(parse_double(spelling.substr(5), "fkdv exponent"));
  }
  if (spelling.starts_with("custom:")) {
    return custom_from_file(std::filesystem::path(std::string(spelling.substr(7))));
  }
  throw ConfigError("unknown symbol '" + std::string(spelling) +
                    "' (expected whitham, kdv, bo, zero, fkdv:<alpha>, custom:<path>)");
}

double Symbol::operator()(double xi) const {
  const double x = std::abs(xi);
  switch (kind_) {
    case SymbolKind::whitham:
      return whitham_symbol(x);
    case SymbolKind::fkdv:
      return alpha_ == 0.0 ? 1.0 : std::pow(x, alpha_);
    case SymbolKind::kdv:
      return x * x;
    case SymbolKind::bo:
      return x;
    case SymbolKind::zero:
      return 0.0;
    case SymbolKind::custom: {
      if (x > table_xi_.back()) {
        throw OutOfRangeError("custom symbol evaluated at |xi| = " + std::to_string(x) +
                              " beyond table limit " + std::to_string(table_xi_.back()));
      }
      const auto it = std::upper_bound(table_xi_.begin(), table_xi_.end(), x);
      if (it == table_xi_.begin()) {
        throw OutOfRangeError("custom symbol evaluated below its table");
      }
      const std::size_t hi = std::min<std::size_t>(it - table_xi_.begin(), table_xi_.size() - 1);
      const std::size_t lo = hi - 1;
      const double w = (x - table_xi_[lo]) / (table_xi_[hi] - table_xi_[lo]);
      return table_m_[lo] + w * (table_m_[hi] - table_m_[lo]);
    }
  }
  return 0.0;
}

std::string Symbol::spelling() const {
  switch (kind_) {
    case SymbolKind::whitham:
      return "whitham";
    case SymbolKind::kdv:
      return "kdv";
    case SymbolKind::bo:
      return "bo";
    case SymbolKind::zero:
      return "zero";
    case SymbolKind::fkdv: {
      std::ostringstream os;
      os.precision(17);
      os << "fkdv:" << alpha_;
      return os.str();
    }
    case SymbolKind::custom:
      return "custom:" + source_;
  }
  return "zero";
}

Symbol Symbol::with_growth_exponent(double p) const {
  Symbol m = *this;
  m.growth_exponent_ = p;
  return m;
}

Symbol Symbol::with_gamma(std::optional<double> gamma) const {
  Symbol m = *this;
  m.gamma_ = gamma;
  return m;
}

Symbol Symbol::with_lower_exponent(std::optional<double> r) const {
  Symbol m = *this;
  m.lower_exponent_ = r;
  return m;
}

Symbol Symbol::with_tail_threshold(double n) const {
  if (!(n > 0.0)) throw ConfigError("tail threshold must be positive");
  Symbol m = *this;
  m.tail_threshold_ = n;
  return m;
}

double Symbol::max_abs_xi() const noexcept {
  if (kind_ == SymbolKind::custom) return table_xi_.back();
  return std::numeric_limits<double>::infinity();
}

ConditionReport check_symbol_conditions(const Symbol& symbol, double xi_max, int n_samples) {
  const double n_tail = symbol.tail_threshold();
  if (!(xi_max > n_tail)) throw ConfigError("xi_max must exceed the tail threshold N");
  if (n_samples < 16) throw ConfigError("need at least 16 samples");

  ConditionReport rep;
  rep.declared_p = symbol.growth_exponent();
  rep.declared_gamma = symbol.gamma();
  rep.declared_r = symbol.lower_exponent();

  // Evenness on a uniform grid and on the tail grid, both signs.
  const auto count = static_cast<std::size_t>(n_samples);
  for (std::size_t i = 0; i < count; ++i) {
    const double xi = xi_max * static_cast<double>(i) / static_cast<double>(count - 1);
    rep.evenness_defect = std::max(rep.evenness_defect, std::abs(symbol(xi) - symbol(-xi)));
  }

  std::vector<double> xs(count);
  const double log_lo = std::log(n_tail), log_hi = std::log(xi_max);
  for (std::size_t i = 0; i < count; ++i) {
    xs[i] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                  static_cast<double>(count - 1));
  }
  xs.back() = xi_max;

  std::vector<double> lx, lm;
  for (double xi : xs) {
    const double v = symbol(xi);
    rep.evenness_defect = std::max(rep.evenness_defect, std::abs(v - symbol(-xi)));
    if (std::abs(v) > 0.0 && std::isfinite(v)) {
      lx.push_back(std::log(xi));
      lm.push_back(std::log(std::abs(v)));
    }
  }
  rep.usable_samples = lx.size();
  if (lx.size() < 2) {
    throw InsufficientDataError("fewer than two usable tail samples for the exponent fit");
  }
  const SlopeFit fit = linear_fit(lx, lm);
  rep.fitted_exponent = fit.slope;
  rep.fit_halfwidth = fit.halfwidth;

  constexpr double kExponentTolerance = 0.05;
  rep.growth_consistent = rep.fitted_exponent <= rep.declared_p + kExponentTolerance;
  if (rep.declared_r) {
    rep.lower_consistent = rep.fitted_exponent >= *rep.declared_r - kExponentTolerance;
  }

  rep.gamma_used = rep.declared_gamma.value_or(std::max(rep.fitted_exponent, 0.0));
  if (!rep.declared_gamma) rep.notes.push_back("gamma not declared; using max(fitted exponent, 0)");
  rep.gamma_outside_range = rep.gamma_used >= 2.0;
  if (rep.gamma_outside_range) {
    rep.notes.push_back("gamma >= 2: outside the range of the real-line non-uniformity result");
  }

  // Tail-Lipschitz ratios |m(xi+y)-m(xi)| / (|y| |xi|^(gamma-1)).
  std::vector<double> ratio_x, ratio_log;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double xi = xs[i];
    const double spacing = xs[i + 1] - xs[i];
    double worst = 0.0;
    for (double frac : {1e-1, 1e-2, 1e-3}) {
      const double y = frac * spacing;
      const double r =
          std::abs(symbol(xi + y) - symbol(xi)) / (y * std::pow(xi, rep.gamma_used - 1.0));
      worst = std::max(worst, r);
    }
    if (!std::isfinite(worst)) {
      rep.tail_violated = true;
      continue;
    }
    rep.tail_constant = std::max(rep.tail_constant, worst);
    if (i >= count / 2 && worst > 0.0) {
      ratio_x.push_back(std::log(xi));
      ratio_log.push_back(std::log(worst));
    }
  }
  if (ratio_x.size() >= 2) {
    rep.tail_ratio_trend = linear_fit(ratio_x, ratio_log).slope;
    // A ratio that keeps growing with xi means no finite C works.
    if (rep.tail_ratio_trend > 0.05) rep.tail_violated = true;
  }
  if (rep.tail_violated) rep.notes.push_back("tail-Lipschitz condition violated for declared gamma");
  return rep;
}

}  // namespace whitham
