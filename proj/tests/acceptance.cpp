// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "whitham/constructions.hpp"
#include "whitham/experiments.hpp"
#include "whitham/solver.hpp"

using namespace whitham;

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt_pi = std::sqrt(pi);

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

bool verdict(const ExperimentReport& rep, const std::string& name, Outcome& o) {
  const Verdict* v = rep.find_verdict(name);
  if (!v) {
    o.require(false, "missing verdict " + name);
    return false;
  }
  o.require(v->passed, name);
  return v->passed;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (elapsed > budget_s) {
    o.passed = false;
    o.detail << " [over budget " << budget_s << " s]";
  }
  if (!o.passed) ++failures;
  std::printf("%s criterion %d: %s;%s (%.2f s)\n", o.passed ? "PASS" : "FAIL", id, title,
              o.detail.str().c_str(), elapsed);
  std::fflush(stdout);
}

SolverConfig fixed_steps(double dt, double t_end) {
  SolverConfig cfg;
  cfg.dt_policy = FixedStep{dt};
  cfg.t_end = t_end;
  cfg.monitor_every = 1000000;
  return cfg;
}

}  // namespace

int main() {
  const Symbol whitham = Symbol::whitham();
  const int cores = static_cast<int>(std::max(1u, std::min(4u, std::thread::hardware_concurrency())));

  criterion(1, "residual identity over 72 cases", 5.0, [&](Outcome& o) {
    double worst = 0.0;
    int cases = 0;
    for (int n : {2, 4, 8, 16}) {
      for (double s : {1.0, 2.0, 2.5}) {
        for (double omega : {-1.0, 0.0, 1.0}) {
          for (double t : {0.0, 0.3}) {
            const PeriodicFamilyParams p{n, omega, s};
            const PeriodicGrid g(2.0 * pi, std::max<std::size_t>(64, 16 * n));
            const PeriodicFamily fam(p, whitham, g);
            const Field e = periodic_error_exact(p, whitham, t, g);
            const double rel =
                sobolev_distance(residual(fam, whitham, t), e, 0.0) / sobolev_norm(e, 0.0);
            worst = std::max(worst, rel);
            ++cases;
          }
        }
      }
    }
    o.detail << " cases " << cases << ", worst relative H0 error " << worst;
    o.require(cases == 72, "case count");
    o.require(worst <= 1e-12, "identity tolerance 1e-12");
  });

  criterion(2, "periodic residual decay slopes", 5.0, [&](Outcome& o) {
    for (auto [s, sigma] : {std::pair{2.0, 0.0}, std::pair{2.0, 2.0}, std::pair{1.0, 0.0}}) {
      ErrorDecayConfig cfg;
      cfg.s = s;
      cfg.sigma = sigma;
      cfg.n_list = {8, 16, 32, 64};
      const auto rep = verify_error_decay(whitham, cfg);
      const double slope = rep.find_slope("residual_vs_n")->fit.slope;
      o.detail << " (s=" << s << ",sigma=" << sigma << ") slope " << slope << " target "
               << -2 * s + 1 + sigma << ";";
      o.require(std::abs(slope - (-2 * s + 1 + sigma)) <= 0.05, "slope tolerance 0.05");
    }
  });

  criterion(3, "norm lemmas", 30.0, [&](Outcome& o) {
    NormLemmaConfig cfg;
    const auto rep = verify_norm_lemmas(whitham, cfg, {cores, {}});
    verdict(rep, "sine_norm_exact", o);
    verdict(rep, "packet_norm_limit", o);
    verdict(rep, "quadrature_crosscheck", o);
    o.detail << " sine ratio error " << rep.find_verdict("sine_norm_exact")->value
             << ", packet norm error at lambda 256 " << rep.find_verdict("packet_norm_limit")->value;
    // independent 30-digit reference for the envelope norm
    const double reference = 1.67672612717363680652;
    o.detail << ", |phi| error vs reference " << std::abs(bump_l2_norm() - reference);
    o.require(std::abs(bump_l2_norm() - reference) <= 1e-10, "quadrature reference");
  });

  criterion(4, "solver correctness", 120.0, [&](Outcome& o) {
    {
      const PeriodicGrid g(2.0 * pi, 64);
      const double amp = 1e-8;
      const Field u0 = Field::sample(g, [&](double x) { return amp * std::sin(x); });
      const auto res = evolve(u0, whitham, fixed_steps(0.01, 1.0), 2.0);
      const Field exact =
          Field::sample(g, [&](double x) { return amp * std::sin(x - whitham(1.0)); });
      const double err = oracle::max_diff(res.final, exact) / amp;
      o.detail << " (a) phase error " << err << ";";
      o.require(err < 1e-6, "(a) linear phase");
    }
    {
      const PeriodicGrid g(2.0 * pi, 256);
      const Field u0 = Field::sample(g, [](double x) { return std::sin(x); });
      const auto res = evolve(u0, Symbol::zero(), fixed_steps(1e-3, 0.5), 1.0);
      const Field exact =
          Field::sample(g, [](double x) { return oracle::burgers_sine(1.0, 0.5, x); });
      const double err = oracle::max_diff(res.final, exact);
      o.detail << " (b) Burgers error " << err << ";";
      o.require(res.status == RunStatus::completed && err < 1e-6, "(b) characteristics");
    }
    {
      const PeriodicGrid g(2.0 * pi, 1024);
      const Field u0 = Field::sample(g, [](double x) { return std::sin(x); });
      const auto run = [&](int k) { return evolve(u0, whitham, fixed_steps(1.0 / k, 1.0), 2.0).final; };
      const Field ref = run(6400);
      const double e1 = oracle::max_diff(run(800), ref);
      const double e2 = oracle::max_diff(run(1600), ref);
      o.detail << " (c) refinement factor " << e1 / e2 << ";";
      o.require(e1 / e2 >= 12.0 && e1 / e2 <= 20.0, "(c) fourth order");
    }
    {
      const auto rep = verify_conservation(whitham, ConservationConfig{});
      verdict(rep, "l2_drift", o);
      verdict(rep, "hamiltonian_drift", o);
      o.detail << " (d) L2 drift " << rep.find_verdict("l2_drift")->value << ", H drift "
               << rep.find_verdict("hamiltonian_drift")->value;
    }
  });

  criterion(5, "skew symmetry and Galilean invariance", 60.0, [&](Outcome& o) {
    GalileanConfig cfg;
    const auto rep = verify_galilean(whitham, cfg, {cores, {}});
    verdict(rep, "skew_symmetry", o);
    verdict(rep, "galilean_discrepancy", o);
    o.detail << " skew " << rep.find_verdict("skew_symmetry")->value << " over "
             << cfg.random_fields << " fields, discrepancy "
             << rep.find_verdict("galilean_discrepancy")->value;
  });

  criterion(6, "periodic non-uniform dependence", 600.0, [&](Outcome& o) {
    PeriodicNonuniformConfig cfg;
    const auto rep = run_periodic_nonuniform(whitham, cfg, {cores, {}});
    verdict(rep, "initial_distance_slope", o);
    verdict(rep, "separation_floor", o);
    verdict(rep, "gap_decreasing", o);
    verdict(rep, "instances_completed", o);
    o.detail << " d0 slope " << rep.find_slope("d0_vs_n")->fit.slope << ";";
    for (const auto& row : rep.rows) {
      const int n = row["n"].get<int>();
      const double d0 = row["d0"].get<double>();
      o.require(std::abs(d0 / (2.0 / n * std::sqrt(2.0 * pi)) - 1.0) < 1e-12, "d0 closed form");
      o.require(!row["d_star"].is_null() && row["d_star"].get<double>() >= 1.4, "evolved distance >= 1.4");
      if (n == 32) o.require(d0 <= 0.16, "d0 at n=32");
      if (n == 256) o.require(d0 <= 0.02, "d0 at n=256");
      o.detail << " n=" << n << " d0 " << d0 << " d* "
               << (row["d_star"].is_null() ? -1.0 : row["d_star"].get<double>()) << " gap "
               << row["gap"].get<double>() << ";";
    }
  });

  criterion(7, "low-regularity periodic non-uniform dependence", 600.0, [&](Outcome& o) {
    PeriodicLowregConfig cfg;
    const auto rep = run_periodic_lowreg(whitham, cfg, {cores, {}});
    verdict(rep, "initial_distance_closed_form", o);
    verdict(rep, "initial_distance_decreasing", o);
    verdict(rep, "separation_floor", o);
    for (const auto& row : rep.rows) {
      const double d = row["d_tn"].is_null() ? 0.0 : row["d_tn"].get<double>();
      o.require(d >= 0.5 * 2.0 * sqrt_pi, "distance at t_n");
      o.detail << " n=" << row["n"].get<int>() << " d0 " << row["d0"].get<double>() << " d(t_n) " << d << ";";
    }
  });

  criterion(8, "scaling defect slope", 900.0, [&](Outcome& o) {
    const auto rep = verify_scaling(whitham, ScalingConfig{}, {cores, {}});
    verdict(rep, "defect_slope", o);
    const double slope = rep.find_slope("defect_vs_lambda")->fit.slope;
    o.detail << " slope " << slope;
    o.require(slope <= -1.6, "slope <= -1.6");
  });

  criterion(9, "non-uniform dependence on the line", 1800.0, [&](Outcome& o) {
    LineNonuniformConfig cfg;
    const auto rep = run_line_nonuniform(whitham, cfg, {cores, {}});
    verdict(rep, "initial_distance_slope", o);
    verdict(rep, "separation_floor", o);
    verdict(rep, "boundary_monitor", o);
    verdict(rep, "instances_completed", o);
    const double floor = 0.5 * std::sqrt(2.0) * bump_l2_norm() * std::sin(0.5);
    o.detail << " d0 slope " << rep.find_slope("d0_vs_lambda")->fit.slope << ";";
    for (const auto& row : rep.rows) {
      const double d = row["d_star"].is_null() ? 0.0 : row["d_star"].get<double>();
      o.require(d >= floor, "evolved distance floor");
      o.detail << " lambda=" << row["lambda"].get<double>() << " d* " << d << ";";
    }
    o.detail << " floor " << floor;
  });

  criterion(10, "symbol condition checker", 5.0, [&](Outcome& o) {
    SymbolConditionsConfig cfg;
    cfg.symbols = {"fkdv:1.5", "kdv", "whitham"};
    const auto rep = verify_symbol_conditions(cfg);
    verdict(rep, "fkdv:1.5:exponent", o);
    verdict(rep, "whitham:evenness", o);
    bool kdv_flagged = false;
    for (const auto& row : rep.rows) {
      if (row["symbol"] == "kdv") kdv_flagged = row["gamma_outside_range"].get<bool>();
      if (row["symbol"] == "fkdv:1.5") o.detail << " fkdv exponent " << row["fitted_exponent"].get<double>() << ";";
    }
    o.require(kdv_flagged, "kdv flagged");
    o.require(rep.find_verdict("whitham:evenness")->value == 0.0, "whitham evenness 0");
    o.detail << " kdv flagged " << (kdv_flagged ? "yes" : "no") << "; whitham evenness "
             << rep.find_verdict("whitham:evenness")->value;
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
