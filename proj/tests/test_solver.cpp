#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "whitham/errors.hpp"
#include "whitham/solver.hpp"

using namespace whitham;

namespace {

constexpr double pi = std::numbers::pi;

SolverConfig fixed(double dt, double t_end, int monitor = 10) {
  SolverConfig cfg;
  cfg.dt_policy = FixedStep{dt};
  cfg.t_end = t_end;
  cfg.monitor_every = monitor;
  return cfg;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.dt_policy = FixedStep{0.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.dt_policy = CflStep{1.5};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.monitor_every = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.t_end = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("linear waves travel with phase speed m(k)") {
  const auto g = make_grid(2.0 * pi, 64);
  const auto m = Symbol::whitham();
  const double amp = 1e-8;
  for (int k : {1, 3, 10}) {
    const auto u0 = Field::sample(g, [&](double x) { return amp * std::sin(k * x); });
    const auto res = evolve(u0, m, fixed(0.01, 1.0), 2.0);
    const auto exact =
        Field::sample(g, [&](double x) { return amp * std::sin(k * (x - m(k) * 1.0)); });
    CHECK(oracle::max_diff(res.final, exact) / amp < 1e-7);
  }
}

TEST_CASE("linear part is integrated exactly for the Airy symbol") {
  // kdv symbol with stiff high modes; the exponential integrator has no step restriction
  const auto g = make_grid(2.0 * pi, 64);
  const double amp = 1e-10;
  const auto u0 = Field::sample(g, [&](double x) { return amp * std::cos(20 * x); });
  const auto res = evolve(u0, Symbol::kdv(), fixed(0.1, 1.0), 0.0);
  const auto exact = Field::sample(g, [&](double x) { return amp * std::cos(20 * x - 8000.0); });
  CHECK(oracle::max_diff(res.final, exact) / amp < 1e-7);
}

TEST_CASE("Burgers solution matches characteristics before the shock") {
  const auto g = make_grid(2.0 * pi, 256);
  const auto u0 = Field::sample(g, [](double x) { return std::sin(x); });
  SolverConfig cfg = fixed(1e-3, 0.5, 100);
  const auto res = evolve(u0, Symbol::zero(), cfg, 1.0);
  REQUIRE(res.status == RunStatus::completed);
  const auto exact = Field::sample(g, [](double x) { return oracle::burgers_sine(1.0, 0.5, x); });
  CHECK(oracle::max_diff(res.final, exact) < 1e-6);
}

TEST_CASE("fixed steps land exactly on t_end") {
  const auto g = make_grid(2.0 * pi, 32);
  const auto u0 = Field::sample(g, [](double x) { return 0.1 * std::sin(x); });
  const auto res = evolve(u0, Symbol::whitham(), fixed(0.01, 0.37, 7), 2.0);
  CHECK(res.steps == 37);
  CHECK(res.stop_time == 0.37);
  CHECK(res.diagnostics.times.front() == 0.0);
  CHECK(res.diagnostics.times.back() == 0.37);
  // 0, 7, 14, ..., 35 and the final state
  CHECK(res.diagnostics.size() == 7);
}

TEST_CASE("CFL steps respect max_dt and reach t_end") {
  const auto g = make_grid(2.0 * pi, 32);
  const auto u0 = Field::sample(g, [](double x) { return 1e-3 * std::sin(x); });
  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.max_dt = 0.1;
  const auto res = evolve(u0, Symbol::whitham(), cfg, 2.0);
  CHECK(res.steps >= 10);
  CHECK(res.stop_time == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("snapshot observer sees every diagnostic time") {
  const auto g = make_grid(2.0 * pi, 32);
  const auto u0 = Field::sample(g, [](double x) { return 0.2 * std::cos(x); });
  std::vector<double> seen;
  const auto res = evolve(u0, Symbol::bo(), fixed(0.05, 1.0, 4), 1.0,
                          [&](double t, const Field&) { seen.push_back(t); });
  CHECK(seen == res.diagnostics.times);
}

TEST_CASE("conserved quantities of sin x") {
  const auto g = make_grid(2.0 * pi, 32);
  const auto u = Field::sample(g, [](double x) { return std::sin(x); });
  const auto c = conserved_quantities(u, Symbol::whitham());
  CHECK(std::abs(c.mean) < 1e-16);
  CHECK(c.l2 == doctest::Approx(pi));
  // int u^3 vanishes, so H = m(1) pi / 2
  CHECK(c.hamiltonian == doctest::Approx(0.5 * Symbol::whitham()(1.0) * pi).epsilon(1e-14));
}

TEST_CASE("hamiltonian cubic term") {
  const auto g = make_grid(2.0 * pi, 32);
  const auto u = Field::sample(g, [](double x) { return 1.0 + std::cos(x); });
  // 1/6 int (1 + cos)^3 = 1/6 (2 pi + 3 pi) and zero symbol kills the quadratic part
  const auto c = conserved_quantities(u, Symbol::zero());
  CHECK(c.hamiltonian == doctest::Approx(5.0 * pi / 6.0).epsilon(1e-14));
  CHECK(c.mean == doctest::Approx(2.0 * pi));
}

TEST_CASE("invariants are conserved for moderately resolved data") {
  const auto g = make_grid(2.0 * pi, 256);
  const auto u0 = Field::sample(g, [](double x) { return 0.3 * std::sin(x) + 0.1 * std::cos(2 * x); });
  SolverConfig cfg;
  cfg.dt_policy = CflStep{0.5};
  cfg.t_end = 1.0;
  const auto sym = Symbol::whitham();
  const auto res = evolve(u0, sym, cfg, 2.0);
  const auto a = conserved_quantities(u0, sym);
  const auto b = conserved_quantities(res.final, sym);
  CHECK(std::abs(b.l2 - a.l2) / a.l2 < 1e-10);
  CHECK(std::abs(b.hamiltonian - a.hamiltonian) / std::abs(a.hamiltonian) < 1e-8);
  CHECK(std::abs(b.mean - a.mean) < 1e-15);
}

TEST_CASE("fourth order in time") {
  const auto g = make_grid(2.0 * pi, 128);
  const auto u0 = Field::sample(g, [](double x) { return 0.5 * std::sin(x); });
  const auto sym = Symbol::whitham();
  const auto run = [&](int steps) { return evolve(u0, sym, fixed(1.0 / steps, 1.0, 1000), 0.0).final; };
  const auto ref = run(1600);
  const double e1 = oracle::max_diff(run(50), ref);
  const double e2 = oracle::max_diff(run(100), ref);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("blow-up is reported instead of thrown") {
  const auto g = make_grid(2.0 * pi, 256);
  const auto u0 = Field::sample(g, [](double x) { return std::sin(x); });
  SolverConfig cfg = fixed(1e-3, 2.0, 5);
  cfg.blowup_threshold = 50.0;
  const auto res = evolve(u0, Symbol::zero(), cfg, 1.0);
  CHECK(res.status == RunStatus::blowup);
  CHECK(res.stop_time > 0.9);
  CHECK(res.stop_time < 1.2);
  CHECK(res.diagnostics.size() > 1);
}

TEST_CASE("step and rhs agree on a zero field") {
  const auto g = make_grid(2.0 * pi, 16);
  const auto z = Field::constant(g, 0.0);
  CHECK(step(z, 0.1, Symbol::whitham()).max_abs() == 0.0);
  CHECK(evolution_rhs(z, Symbol::kdv()).max_abs() == 0.0);
}

TEST_CASE("rhs of a traveling mode") {
  const auto g = make_grid(2.0 * pi, 32);
  const auto u = Field::sample(g, [](double x) { return std::cos(2 * x); });
  const auto r = evolution_rhs(u, Symbol::bo());
  // -u u_x - L u_x = sin(4x) + 4 sin(2x)
  const auto expected = Field::sample(g, [](double x) { return std::sin(4 * x) + 4.0 * std::sin(2 * x); });
  CHECK(oracle::max_diff(r, expected) < 1e-13);
}

TEST_CASE("riccati bound") {
  CHECK(riccati_bound(2.0, 0.1, 1.0) == doctest::Approx(2.0 / 0.8));
  CHECK(std::isinf(riccati_bound(2.0, 1.0, 0.5)));
  CHECK(riccati_bound(2.0, 0.0, 10.0) == 2.0);
}

TEST_CASE("fit_cs recovers the smallest admissible constant") {
  Diagnostics d;
  const double c = 0.2, n0 = 1.5;
  for (double t : {0.0, 0.5, 1.0, 1.5}) {
    d.times.push_back(t);
    d.hs_norm.push_back(riccati_bound(n0, c, t));
    d.mean.push_back(0);
    d.l2.push_back(0);
    d.hamiltonian.push_back(0);
  }
  const auto fitted = fit_cs(d);
  REQUIRE(fitted.has_value());
  CHECK(*fitted == doctest::Approx(c).epsilon(1e-10));

  Diagnostics short_diag;
  short_diag.times = {0.0};
  short_diag.hs_norm = {1.0};
  CHECK_THROWS_AS(fit_cs(short_diag), InsufficientDataError);
}

TEST_CASE("diagnostics csv") {
  Diagnostics d;
  d.times = {0.0, 0.5};
  d.mean = {0.0, 0.0};
  d.l2 = {1.0, 1.0};
  d.hamiltonian = {0.25, 0.25};
  d.hs_norm = {2.0, 2.0};
  std::ostringstream out;
  d.write_csv(out);
  CHECK(out.str() == "t,mean,l2,hamiltonian,hs_norm\n0,0,1,0.25,2\n0.5,0,1,0.25,2\n");
}

}
