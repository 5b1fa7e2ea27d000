#include "whitham/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "whitham/constructions.hpp"
#include "whitham/errors.hpp"
#include "whitham/experiments.hpp"
#include "whitham/field_io.hpp"
#include "whitham/solver.hpp"
#include "whitham/symbols.hpp"

namespace whitham::cli {

namespace {

namespace fs = std::filesystem;
constexpr double two_pi = 2.0 * std::numbers::pi;

const std::vector<std::string> solver_keys{"cfl", "dt", "max-dt", "monitor-every",
                                           "blowup-threshold"};

struct Command {
  std::string name;
  std::string help;
  std::vector<std::string> keys;
};

std::vector<Command> commands() {
  auto with_solver = [](std::vector<std::string> keys) {
    keys.insert(keys.end(), solver_keys.begin(), solver_keys.end());
    return keys;
  };
  return {
      {"simulate", "Integrate one initial state and write trajectory and diagnostics CSV files",
       with_solver({"symbol", "init", "L", "modes", "t-end", "s", "family", "n", "lambda",
                    "delta", "omega", "period-factor", "band-factor"})},
      {"periodic-nonuniform", "Pairs of periodic solutions with shrinking initial distance",
       with_solver({"symbol", "s", "n", "t-star", "modes-per-n", "floor", "slope-tolerance"})},
      {"periodic-lowreg", "Low-regularity periodic pairs at times t_n",
       with_solver({"symbol", "s", "sigma", "eps", "n", "modes-per-n", "floor",
                    "closed-form-tolerance"})},
      {"line-nonuniform", "Pairs of wave packets on a large torus emulating the line",
       with_solver({"symbol", "s", "delta", "lambda", "t-star", "period-factor", "band-factor",
                    "floor", "slope-tolerance", "boundary-tolerance"})},
      {"verify", "Run a verification suite",
       {"suite", "symbol", "s", "sigma", "family", "n", "lambda", "delta", "omega", "t", "alpha",
        "modes", "modes-per-n", "period-factor", "band-factor", "t-end", "dt", "amplitude",
        "safety", "random-fields", "xi-max", "samples"}},
  };
}

using Values = std::map<std::string, std::string>;

class Args {
 public:
  explicit Args(const Values& v) : v_(v) {}

  bool has(const std::string& key) const { return v_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = v_.find(key);
    return it == v_.end() ? fallback : it->second;
  }

  double num(const std::string& key, double fallback) const {
    auto it = v_.find(key);
    return it == v_.end() ? fallback : to_double(it->second, key);
  }

  long integer(const std::string& key, long fallback) const {
    auto it = v_.find(key);
    return it == v_.end() ? fallback : to_long(it->second, key);
  }

  std::vector<double> nums(const std::string& key, std::vector<double> fallback) const {
    auto it = v_.find(key);
    if (it == v_.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : split(it->second, ',')) out.push_back(to_double(item, key));
    return out;
  }

  std::vector<int> ints(const std::string& key, std::vector<int> fallback) const {
    auto it = v_.find(key);
    if (it == v_.end()) return fallback;
    std::vector<int> out;
    for (const auto& item : split(it->second, ',')) out.push_back(static_cast<int>(to_long(item, key)));
    return out;
  }

  static std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
      if (!item.empty()) parts.push_back(item);
    }
    return parts;
  }

  static double to_double(const std::string& text, const std::string& key) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("--" + key + ": '" + text + "' is not a number");
  }

  static long to_long(const std::string& text, const std::string& key) {
    try {
      std::size_t used = 0;
      const long v = std::stol(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("--" + key + ": '" + text + "' is not an integer");
  }

 private:
  const Values& v_;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

SolverConfig solver_from(const Args& a, SolverConfig cfg) {
  if (a.has("dt") && a.has("cfl")) throw ConfigError("--dt and --cfl are mutually exclusive");
  if (a.has("dt")) cfg.dt_policy = FixedStep{a.num("dt", 0.0)};
  if (a.has("cfl")) cfg.dt_policy = CflStep{a.num("cfl", 0.5)};
  cfg.max_dt = a.num("max-dt", cfg.max_dt);
  cfg.monitor_every = static_cast<int>(a.integer("monitor-every", cfg.monitor_every));
  cfg.blowup_threshold = a.num("blowup-threshold", cfg.blowup_threshold);
  return cfg;
}

void require_writable_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir) || ::access(dir.c_str(), W_OK) != 0) {
    throw ConfigError("output directory " + dir.string() + " is not writable");
  }
}

struct Global {
  std::optional<std::string> out;
  int jobs = 1;
  bool reproducible = false;
  long seed = 0;
  bool seed_given = false;
};

// --- simulate -------------------------------------------------------------

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  for (const auto& part : Args::split(text, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value in '" + part + "'");
    kv[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
  }
  return kv;
}

Field simulate_initial(const Args& a, const Symbol& symbol) {
  std::string init = a.str("init", "");
  if (init.empty() && a.has("family")) {
    const std::string fam = a.str("family", "");
    std::string spec = "family:" + fam + ":";
    std::vector<std::string> keys = fam == "line"
                                        ? std::vector<std::string>{"lambda", "delta", "omega", "s",
                                                                   "period-factor"}
                                        : std::vector<std::string>{"n", "omega", "s"};
    bool first = true;
    for (const auto& k : keys) {
      if (!a.has(k)) continue;
      spec += (first ? "" : ",") + (k == "period-factor" ? std::string("P") : k) + "=" + a.str(k, "");
      first = false;
    }
    init = spec;
  }
  if (init.empty()) throw ConfigError("simulate needs --init or --family");

  const std::size_t modes_flag = static_cast<std::size_t>(std::max(0L, a.integer("modes", 0)));
  if (a.has("modes") && a.integer("modes", 0) <= 0) throw ConfigError("--modes must be positive");

  if (init.starts_with("sine:")) {
    const auto parts = Args::split(init.substr(5), ',');
    if (parts.size() != 2) throw ConfigError("sine initial data is sine:<n>,<amp>");
    const double n = Args::to_double(parts[0], "init");
    const double amp = Args::to_double(parts[1], "init");
    const double length = a.num("L", two_pi);
    const PeriodicGrid grid = make_grid(length, modes_flag ? modes_flag : 256);
    if (std::abs(n) >= static_cast<double>(grid.nyquist())) {
      throw ConfigError("sine wavenumber is not resolved by the grid");
    }
    return Field::sample(grid, [&](double x) { return amp * std::sin(two_pi * n * x / length); });
  }
  if (init.starts_with("file:")) {
    const fs::path path = init.substr(5);
    if (!fs::exists(path)) throw ConfigError("initial data file " + path.string() + " not found");
    Field f = read_field(path);
    if (a.has("L")) {
      const double length = a.num("L", 0.0);
      if (std::abs(length - f.grid().length()) > 1e-9 * length) {
        throw ConfigError("--L does not match the torus length of " + path.string());
      }
    }
    if (modes_flag && modes_flag != f.size()) f = resample(f, modes_flag);
    return f;
  }
  if (init.starts_with("family:periodic:") || init == "family:periodic") {
    const auto kv = key_values(init.size() > 16 ? init.substr(16) : "");
    PeriodicFamilyParams p;
    for (const auto& [k, v] : kv) {
      if (k == "n") p.n = static_cast<int>(Args::to_long(v, "init"));
      else if (k == "omega") p.omega = Args::to_double(v, "init");
      else if (k == "s") p.s = Args::to_double(v, "init");
      else throw ConfigError("unknown periodic family parameter '" + k + "'");
    }
    p.validate();
    if (a.has("L") && std::abs(a.num("L", 0.0) - two_pi) > 1e-6 * two_pi) {
      throw ConfigError("the periodic family lives on a torus of length 2 pi");
    }
    const std::size_t modes = modes_flag ? modes_flag : std::max<std::size_t>(64, 16 * p.n);
    return periodic_approx(p, symbol, 0.0, make_grid(two_pi, modes));
  }
  if (init.starts_with("family:line:") || init == "family:line") {
    const auto kv = key_values(init.size() > 12 ? init.substr(12) : "");
    LineFamilyParams p;
    for (const auto& [k, v] : kv) {
      if (k == "lambda") p.lambda = Args::to_double(v, "init");
      else if (k == "delta") p.delta = Args::to_double(v, "init");
      else if (k == "omega") p.omega = Args::to_double(v, "init");
      else if (k == "s") p.s = Args::to_double(v, "init");
      else if (k == "P") p.period_factor = Args::to_double(v, "init");
      else throw ConfigError("unknown line family parameter '" + k + "'");
    }
    p.validate(&symbol);
    PeriodicGrid grid = line_grid(p, a.num("band-factor", 2.5));
    if (a.has("L") && std::abs(a.num("L", 0.0) - grid.length()) > 1e-9 * grid.length()) {
      throw ConfigError("--L does not match the line family torus length");
    }
    if (modes_flag) grid = make_grid(grid.length(), modes_flag);
    return low_freq_initial(p, grid) + high_freq(p, symbol, 0.0, grid);
  }
  throw ConfigError("unknown initial data '" + init +
                    "' (expected sine:<n>,<amp>, file:<path>, family:periodic:..., family:line:...)");
}

int run_simulate(const Args& a, const Global& g, std::ostream& out) {
  const Symbol symbol = Symbol::parse(a.str("symbol", "whitham"));
  const Field u0 = simulate_initial(a, symbol);
  SolverConfig cfg;
  cfg.t_end = a.num("t-end", 1.0);
  cfg = solver_from(a, cfg);
  cfg.validate();
  const double s = a.num("s", 2.0);
  const fs::path dir = g.out.value_or("run");
  require_writable_dir(dir);

  std::ofstream traj(dir / "trajectory.csv");
  if (!traj) throw ConfigError("cannot write " + (dir / "trajectory.csv").string());
  traj << "t,x,u\n";
  char line[96];
  const auto observer = [&](double t, const Field& u) {
    for (std::size_t j = 0; j < u.size(); ++j) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", t, u.grid().point(j), u[j]);
      traj << line;
    }
  };
  const EvolveResult res = evolve(u0, symbol, cfg, s, observer);
  res.diagnostics.write_csv(dir / "diagnostics.csv");
  write_field_text(res.final, dir / "final.txt");

  out << "steps " << res.steps << " stop_time " << res.stop_time << "\n";
  switch (res.status) {
    case RunStatus::completed:
      return ok;
    case RunStatus::blowup:
      std::cerr << "blow-up detected at t = " << res.stop_time << "\n";
      return verdict_failed;
    case RunStatus::step_underflow:
      std::cerr << "time step underflow at t = " << res.stop_time << "\n";
      return verdict_failed;
  }
  return ok;
}

// --- experiments ----------------------------------------------------------

template <class Runner>
int run_experiment(const Global& g, std::ostream& out, const std::string& default_name,
                   Runner&& runner) {
  std::optional<fs::path> report_path;
  RunOptions opt;
  opt.jobs = g.jobs;
  if (g.out) {
    fs::path p = *g.out;
    if (g.out->ends_with('/') || fs::is_directory(p)) p /= default_name + ".json";
    report_path = p;
    const fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
    require_writable_dir(parent);
    if (fs::exists(p) && ::access(p.c_str(), W_OK) != 0) {
      throw ConfigError("report path " + p.string() + " is not writable");
    }
    opt.trajectory_dir = parent / (p.stem().string() + "_trajectories");
  }
  ExperimentReport rep = runner(opt);
  rep.params["seed"] = g.seed;
  if (report_path) {
    write_report(rep, *report_path, g.reproducible);
  } else {
    out << render_json(rep.to_json());
  }
  for (const auto& v : rep.verdicts) {
    if (!v.passed) std::cerr << "verdict failed: " << v.name << " (" << v.value << ")\n";
  }
  return rep.passed() ? ok : verdict_failed;
}

FamilyKind family_kind(const Args& a) {
  const std::string f = a.str("family", "periodic");
  if (f == "periodic") return FamilyKind::periodic;
  if (f == "line") return FamilyKind::line;
  throw ConfigError("--family must be periodic or line");
}

int run_command(const std::string& name, const Args& a, const Global& g, std::ostream& out) {
  if (name == "simulate") return run_simulate(a, g, out);

  if (name == "periodic-nonuniform") {
    const Symbol symbol = Symbol::parse(a.str("symbol", "whitham"));
    PeriodicNonuniformConfig cfg;
    cfg.s = a.num("s", cfg.s);
    cfg.n_list = a.ints("n", cfg.n_list);
    cfg.t_star = a.num("t-star", cfg.t_star);
    cfg.modes_per_n = static_cast<int>(a.integer("modes-per-n", cfg.modes_per_n));
    cfg.floor = a.num("floor", cfg.floor);
    cfg.slope_tolerance = a.num("slope-tolerance", cfg.slope_tolerance);
    cfg.solver = solver_from(a, cfg.solver);
    cfg.validate();
    return run_experiment(g, out, name, [&](const RunOptions& o) {
      return run_periodic_nonuniform(symbol, cfg, o);
    });
  }

  if (name == "periodic-lowreg") {
    const Symbol symbol = Symbol::parse(a.str("symbol", "whitham"));
    PeriodicLowregConfig cfg;
    cfg.s = a.num("s", cfg.s);
    cfg.sigma = a.num("sigma", cfg.sigma);
    cfg.eps = a.num("eps", cfg.eps);
    cfg.n_list = a.ints("n", cfg.n_list);
    cfg.modes_per_n = static_cast<int>(a.integer("modes-per-n", cfg.modes_per_n));
    cfg.floor = a.num("floor", cfg.floor);
    cfg.closed_form_tolerance = a.num("closed-form-tolerance", cfg.closed_form_tolerance);
    cfg.solver = solver_from(a, cfg.solver);
    cfg.validate();
    return run_experiment(g, out, name, [&](const RunOptions& o) {
      return run_periodic_lowreg(symbol, cfg, o);
    });
  }

  if (name == "line-nonuniform") {
    const Symbol symbol = Symbol::parse(a.str("symbol", "whitham"));
    LineNonuniformConfig cfg;
    cfg.s = a.num("s", cfg.s);
    cfg.delta = a.num("delta", cfg.delta);
    cfg.lambda_list = a.nums("lambda", cfg.lambda_list);
    cfg.t_star = a.num("t-star", cfg.t_star);
    cfg.period_factor = a.num("period-factor", cfg.period_factor);
    cfg.band_factor = a.num("band-factor", cfg.band_factor);
    cfg.floor = a.num("floor", cfg.floor);
    cfg.slope_tolerance = a.num("slope-tolerance", cfg.slope_tolerance);
    cfg.boundary_tolerance = a.num("boundary-tolerance", cfg.boundary_tolerance);
    cfg.solver = solver_from(a, cfg.solver);
    cfg.validate(symbol);
    return run_experiment(g, out, name, [&](const RunOptions& o) {
      return run_line_nonuniform(symbol, cfg, o);
    });
  }

  if (name == "verify") {
    const std::string suite = a.str("suite", "");
    if (suite.empty()) throw ConfigError("verify needs --suite");
    const std::string id = "verify-" + suite;
    if (suite == "symbol-conditions") {
      SymbolConditionsConfig cfg;
      if (a.has("symbol")) cfg.symbols = Args::split(a.str("symbol", ""), ',');
      for (const auto& s : cfg.symbols) Symbol::parse(s);
      cfg.xi_max = a.num("xi-max", cfg.xi_max);
      cfg.n_samples = static_cast<int>(a.integer("samples", cfg.n_samples));
      cfg.validate();
      return run_experiment(g, out, id,
                            [&](const RunOptions& o) { return verify_symbol_conditions(cfg, o); });
    }
    const Symbol symbol = Symbol::parse(a.str("symbol", "whitham"));
    if (suite == "norm-lemmas") {
      NormLemmaConfig cfg;
      cfg.n_list = a.ints("n", cfg.n_list);
      if (a.has("sigma")) cfg.sigma_list = a.nums("sigma", cfg.sigma_list);
      cfg.alpha = a.num("alpha", cfg.alpha);
      cfg.lambda_list = a.nums("lambda", cfg.lambda_list);
      cfg.delta = a.num("delta", cfg.delta);
      cfg.s = a.num("s", cfg.s);
      cfg.period_factor = a.num("period-factor", cfg.period_factor);
      cfg.band_factor = a.num("band-factor", cfg.band_factor);
      cfg.validate();
      return run_experiment(g, out, id,
                            [&](const RunOptions& o) { return verify_norm_lemmas(symbol, cfg, o); });
    }
    if (suite == "error-decay") {
      ErrorDecayConfig cfg;
      cfg.family = family_kind(a);
      cfg.s = a.num("s", cfg.s);
      cfg.sigma = a.num("sigma", cfg.sigma);
      cfg.n_list = a.ints("n", cfg.n_list);
      cfg.modes_per_n = static_cast<int>(a.integer("modes-per-n", cfg.modes_per_n));
      cfg.omega = a.num("omega", cfg.omega);
      cfg.t = a.num("t", cfg.t);
      cfg.delta = a.num("delta", cfg.delta);
      cfg.lambda_list = a.nums("lambda", cfg.lambda_list);
      cfg.period_factor = a.num("period-factor", cfg.period_factor);
      cfg.band_factor = a.num("band-factor", cfg.band_factor);
      cfg.validate(symbol);
      return run_experiment(g, out, id,
                            [&](const RunOptions& o) { return verify_error_decay(symbol, cfg, o); });
    }
    if (suite == "scaling") {
      ScalingConfig cfg;
      cfg.delta = a.num("delta", cfg.delta);
      cfg.lambda_list = a.nums("lambda", cfg.lambda_list);
      cfg.omega = a.num("omega", cfg.omega);
      cfg.t_max = a.num("t-end", cfg.t_max);
      cfg.dt = a.num("dt", cfg.dt);
      cfg.period_factor = a.num("period-factor", cfg.period_factor);
      cfg.modes = static_cast<std::size_t>(a.integer("modes", static_cast<long>(cfg.modes)));
      cfg.validate();
      return run_experiment(g, out, id,
                            [&](const RunOptions& o) { return verify_scaling(symbol, cfg, o); });
    }
    if (suite == "conservation") {
      ConservationConfig cfg;
      cfg.modes = static_cast<std::size_t>(a.integer("modes", static_cast<long>(cfg.modes)));
      cfg.amplitude = a.num("amplitude", cfg.amplitude);
      cfg.t_end = a.num("t-end", cfg.t_end);
      cfg.safety = a.num("safety", cfg.safety);
      cfg.s = a.num("s", cfg.s);
      cfg.validate();
      return run_experiment(g, out, id,
                            [&](const RunOptions& o) { return verify_conservation(symbol, cfg, o); });
    }
    if (suite == "galilean") {
      GalileanConfig cfg;
      cfg.modes = static_cast<std::size_t>(a.integer("modes", static_cast<long>(cfg.modes)));
      cfg.omega = a.num("omega", cfg.omega);
      cfg.t_end = a.num("t-end", cfg.t_end);
      cfg.dt = a.num("dt", cfg.dt);
      cfg.s = a.num("s", cfg.s);
      cfg.random_fields = static_cast<int>(a.integer("random-fields", cfg.random_fields));
      if (g.seed_given) cfg.seed = static_cast<std::uint64_t>(g.seed);
      cfg.validate();
      Global g2 = g;
      g2.seed = static_cast<long>(cfg.seed);
      return run_experiment(g2, out, id,
                            [&](const RunOptions& o) { return verify_galilean(symbol, cfg, o); });
    }
    throw ConfigError("unknown suite '" + suite +
                      "' (expected norm-lemmas, error-decay, scaling, conservation, galilean, "
                      "symbol-conditions)");
  }
  throw ConfigError("unknown command " + name);
}

int run_symbols_eval(const Args& a, const Global& g, std::ostream& out) {
  const Symbol symbol = Symbol::parse(a.str("symbol", "whitham"));
  const auto xi = a.nums("xi", {0.0, 0.5, 1.0, 2.0, 4.0, 8.0});
  std::ostringstream text;
  char line[80];
  for (double x : xi) {
    std::snprintf(line, sizeof line, "%.17g %.17g\n", x, symbol(x));
    text << line;
  }
  if (g.out) {
    const fs::path p = *g.out;
    require_writable_dir(p.has_parent_path() ? p.parent_path() : fs::path("."));
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << text.str();
  } else {
    out << text.str();
  }
  return ok;
}

// Index in args right after the command token(s), or npos when there is none.
std::size_t command_end(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--out" || a == "--jobs" || a == "--config" || a == "--seed") {
      ++i;
      continue;
    }
    if (a.starts_with("-")) continue;
    if (a == "symbols" && i + 1 < args.size() && args[i + 1] == "eval") return i + 2;
    return i + 1;
  }
  return std::string::npos;
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  return path;
}

}  // namespace

std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (key == "config") throw ConfigError(path + ": config files cannot include others");
    if (value == "true" || value == "false") {
      if (value == "true") out.push_back("--" + key);
      continue;
    }
    out.push_back("--" + key);
    out.push_back(value);
  }
  return out;
}

int run(const std::vector<std::string>& input, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = input;

  CLI::App app{"Nonuniform dependence experiments for Whitham-type equations", "whitham"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  std::string out_path;
  int jobs = 1;
  bool reproducible = false;
  std::string config;
  long seed = 0;
  auto* out_opt = app.add_option("--out", out_path, "Report file, or output directory for simulate");
  app.add_option("--jobs", jobs, "Worker threads for experiments")->check(CLI::PositiveNumber);
  app.add_flag("--reproducible", reproducible, "Omit the timestamp sidecar from reports");
  app.add_option("--config", config, "key = value file; command-line flags take precedence");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed, recorded in every report");

  std::map<std::string, Values> store;
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->fallthrough();
    for (const auto& key : cmd.keys) sub->add_option("--" + key, raw[cmd.name][key]);
    subs[cmd.name] = sub;
  }
  auto* symbols = app.add_subcommand("symbols", "Symbol utilities");
  symbols->require_subcommand(1);
  symbols->fallthrough();
  auto* eval = symbols->add_subcommand("eval", "Print xi m(xi) pairs");
  eval->fallthrough();
  eval->add_option("--symbol", raw["symbols eval"]["symbol"]);
  eval->add_option("--xi", raw["symbols eval"]["xi"], "Comma-separated frequencies");

  try {
    if (auto path = config_path(args)) {
      const auto extra = config_file_args(*path);
      const std::size_t pos = command_end(args);
      if (pos == std::string::npos) throw ConfigError("a command is required");
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos), extra.begin(), extra.end());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return config_error;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }

  Global g;
  if (out_opt->count() > 0) g.out = out_path;
  g.jobs = jobs;
  g.reproducible = reproducible;
  g.seed = seed;
  g.seed_given = seed_opt->count() > 0;

  auto collect = [&](const std::string& name, CLI::App* sub) {
    Values& v = store[name];
    for (const auto& [key, value] : raw[name]) {
      if (sub->get_option("--" + key)->count() > 0) v[key] = value;
    }
    return Args(v);
  };

  try {
    if (eval->parsed()) return run_symbols_eval(collect("symbols eval", eval), g, out);
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) return run_command(name, collect(name, sub), g, out);
    }
    err << app.help();
    return config_error;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const GridMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return verdict_failed;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace whitham::cli
