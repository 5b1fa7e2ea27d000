#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "whitham/constructions.hpp"
#include "whitham/errors.hpp"

using namespace whitham;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_SUITE("constructions") {

// reference values from 30-digit mpmath quadrature
TEST_CASE("bump values") {
  CHECK(bump_transition(0.0) == 0.0);
  CHECK(bump_transition(1.0) == 1.0);
  CHECK(bump_transition(0.5) == doctest::Approx(0.5));
  CHECK(bump_transition(0.3) == doctest::Approx(0.129570469399705917).epsilon(1e-14));
  CHECK(bump(0.0) == 1.0);
  CHECK(bump(1.0) == 1.0);
  CHECK(bump(-2.0) == 0.0);
  CHECK(bump(1.25) == doctest::Approx(0.935030830871335938).epsilon(1e-14));
  CHECK(bump_tilde(2.0) == 1.0);
  CHECK(bump_tilde(-2.5) == doctest::Approx(0.5));
  CHECK(bump_tilde(3.0) == 0.0);
}

TEST_CASE("bump is even, monotone on the transition and between 0 and 1") {
  double prev = 1.0;
  for (double x = 0.0; x <= 3.5; x += 0.01) {
    CHECK(bump(x) == bump(-x));
    CHECK(bump(x) <= prev);
    CHECK(bump(x) >= 0.0);
    CHECK(bump_tilde(x) >= bump(x));
    prev = bump(x);
  }
}

TEST_CASE("bump norms") {
  CHECK(bump_l2_norm() == doctest::Approx(1.67672612717363680652).epsilon(1e-13));
  CHECK(bump_tilde_l2_norm() == doctest::Approx(2.19349276396041545484).epsilon(1e-13));
}

TEST_CASE("periodic family at t = 0") {
  const PeriodicFamilyParams p{4, 1.0, 2.0};
  const auto g = make_grid(2.0 * pi, 64);
  const auto u = periodic_approx(p, Symbol::whitham(), 0.0, g);
  const auto expected = Field::sample(g, [](double x) { return 0.25 + std::cos(4 * x) / 16.0; });
  CHECK(oracle::max_diff(u, expected) < 1e-15);
}

TEST_CASE("periodic family time derivative matches finite differences") {
  const PeriodicFamilyParams p{3, -1.0, 1.5};
  const auto m = Symbol::whitham();
  const auto g = make_grid(2.0 * pi, 64);
  const double t = 0.4, h = 1e-5;
  const auto fd = (1.0 / (2.0 * h)) * (periodic_approx(p, m, t + h, g) - periodic_approx(p, m, t - h, g));
  CHECK(oracle::max_diff(periodic_approx_dt(p, m, t, g), fd) < 1e-8);
}

TEST_CASE("residual of the periodic family is the closed form") {
  const auto m = Symbol::whitham();
  for (int n : {2, 8}) {
    for (double s : {1.0, 2.5}) {
      for (double omega : {-1.0, 0.0, 1.0}) {
        const PeriodicFamilyParams p{n, omega, s};
        const auto g = make_grid(2.0 * pi, std::max<std::size_t>(64, 16 * n));
        const PeriodicFamily fam(p, m, g);
        const double t = 0.3;
        const auto e = periodic_error_exact(p, m, t, g);
        const double rel = sobolev_distance(residual(fam, m, t), e, 0.0) / sobolev_norm(e, 0.0);
        CHECK(rel < 1e-12);
      }
    }
  }
}

TEST_CASE("closed form residual amplitude") {
  const PeriodicFamilyParams p{4, 0.0, 2.0};
  const auto g = make_grid(2.0 * pi, 64);
  const auto e = periodic_error_exact(p, Symbol::whitham(), 0.0, g);
  // -1/2 n^(1-2s) sin(2 n x)
  CHECK(e.max_abs() == doctest::Approx(0.5 * std::pow(4.0, -3.0)).epsilon(1e-12));
}

TEST_CASE("periodic family validation") {
  CHECK_THROWS_AS((PeriodicFamilyParams{0, 1.0, 2.0}.validate()), ConfigError);
  CHECK_THROWS_AS((PeriodicFamilyParams{4, 1.0, -1.0}.validate()), ConfigError);
  const PeriodicFamilyParams p{4, 1.0, 2.0};
  CHECK_THROWS_AS(periodic_approx(p, Symbol::whitham(), 0.0, make_grid(5.0, 64)), ConfigError);
  CHECK_THROWS_AS(periodic_error_exact(p, Symbol::whitham(), 0.0, make_grid(2 * pi, 16)), ConfigError);
}

TEST_CASE("line family validation") {
  LineFamilyParams p;
  CHECK_NOTHROW(p.validate());
  p.delta = 2.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = LineFamilyParams{};
  p.delta = 1.5;
  const auto fk = Symbol::fkdv(1.7);
  CHECK_THROWS_AS(p.validate(&fk), ConfigError);
  p.lambda = 0.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("line grid resolves the carrier band") {
  LineFamilyParams p;
  p.lambda = 16;
  const auto g = line_grid(p);
  CHECK(g.length() == doctest::Approx(32.0 * 64.0));
  CHECK(g.max_wavenumber() >= 2.5 * 16);
  CHECK(modes_for_band(2.0 * pi, 10.0) == 32);
  CHECK(modes_for_band(2.0 * pi, 1.0) == 8);
}

TEST_CASE("high frequency packet norm approaches the envelope norm") {
  for (double lambda : {16.0, 64.0}) {
    LineFamilyParams p;
    p.lambda = lambda;
    p.period_factor = 8;
    const auto g = line_grid(p, 1.5);
    const auto u = high_freq(p, Symbol::whitham(), 0.0, g);
    // lambda^s |u^h|_{L^2} -> |phi|_{L^2} / sqrt 2
    const double normalized = std::pow(lambda, p.s) * sobolev_norm(u, 0.0);
    CHECK(normalized == doctest::Approx(bump_l2_norm() / std::sqrt(2.0)).epsilon(1e-4));
  }
}

TEST_CASE("packets vanish near the torus ends") {
  LineFamilyParams p;
  const auto g = line_grid(p);
  const auto u = low_freq_initial(p, g) + high_freq(p, Symbol::whitham(), 0.0, g);
  CHECK(boundary_ratio(u) < 1e-14);
  CHECK(boundary_ratio(Field::constant(g, 0.0)) == 0.0);
  CHECK(boundary_ratio(Field::constant(g, 1.0)) == 1.0);
}

TEST_CASE("low frequency profile height") {
  LineFamilyParams p;
  p.lambda = 16;
  p.omega = 2.0;
  const auto g = line_grid(p);
  CHECK(low_freq_initial(p, g).max_abs() == doctest::Approx(2.0 / 16.0));
}

TEST_CASE("high frequency time derivative matches finite differences") {
  LineFamilyParams p;
  p.lambda = 8;
  const auto m = Symbol::whitham();
  const auto g = line_grid(p);
  const double t = 0.2, h = 1e-5;
  const auto fd = (1.0 / (2.0 * h)) * (high_freq(p, m, t + h, g) - high_freq(p, m, t - h, g));
  const auto dt = high_freq_dt(p, m, t, g);
  CHECK(oracle::max_diff(dt, fd) < 1e-8 * dt.max_abs());
}

TEST_CASE("rescale field stretches the profile") {
  const auto g = make_grid(2.0 * pi, 32);
  const auto f = Field::sample(g, [](double x) { return std::sin(x) + 0.5 * std::cos(3 * x); });
  const auto r = rescale_field(f, 3.0, 64);
  CHECK(r.grid().length() == doctest::Approx(6.0 * pi));
  const auto expected =
      Field::sample(r.grid(), [](double x) { return std::sin(x / 3) + 0.5 * std::cos(x); });
  CHECK(oracle::max_diff(r, expected) < 1e-14);
  // L^2 norm scales with the square root of the stretch
  CHECK(sobolev_norm(r, 0.0) == doctest::Approx(std::sqrt(3.0) * sobolev_norm(f, 0.0)));
  CHECK_THROWS_AS(rescale_field(f, 2.0, 16), ConfigError);
}

TEST_CASE("trajectory family lookup") {
  const auto g = make_grid(1.0, 8);
  auto fam = trajectory_family({{0.0, Field::constant(g, 1.0)}, {0.5, Field::constant(g, 2.0)}});
  CHECK(fam->value(0.5)[0] == 2.0);
  CHECK_THROWS_AS(fam->value(0.25), OutOfRangeError);
  CHECK_THROWS_AS(residual(*fam, Symbol::zero(), 0.0), UnsupportedFamilyError);
}

TEST_CASE("rescaled solution of a traveling wave") {
  const auto g = make_grid(2.0 * pi, 32);
  auto base = std::make_shared<FunctionFamily>(
      g, [g](double t) { return Field::sample(g, [t](double x) { return std::sin(x - t); }); },
      [g](double t) { return Field::sample(g, [t](double x) { return -std::cos(x - t); }); });
  const auto v = rescale_solution(base, 4.0, 1.5);  // factor 8
  CHECK(v->grid().length() == doctest::Approx(16.0 * pi));
  const auto expected =
      Field::sample(v->grid(), [](double x) { return std::sin(x / 8.0 - 0.25); });
  CHECK(oracle::max_diff(v->value(2.0), expected) < 1e-14);
  const auto dexp =
      Field::sample(v->grid(), [](double x) { return -std::cos(x / 8.0 - 0.25) / 8.0; });
  CHECK(oracle::max_diff(*v->time_derivative(2.0), dexp) < 1e-14);
}

TEST_CASE("residual of an exact linear solution vanishes") {
  // zero amplitude nonlinearity: u = a sin(x - m(1) t) with tiny a
  const auto g = make_grid(2.0 * pi, 32);
  const auto m = Symbol::whitham();
  const double a = 1e-6, c = m(1.0);
  const FunctionFamily fam(
      g, [&](double t) { return Field::sample(g, [&](double x) { return a * std::sin(x - c * t); }); },
      [&](double t) { return Field::sample(g, [&](double x) { return -a * c * std::cos(x - c * t); }); });
  // only the quadratic term survives, of size a^2
  CHECK(residual(fam, m, 0.7).max_abs() < a * a);
}

TEST_CASE("line family combines the evolved low part with the packet") {
  LineFamilyParams p;
  p.lambda = 8;
  const auto m = Symbol::whitham();
  const auto g = line_grid(p);
  const LineFamily fam(p, m, g);
  const auto u0 = fam.value(0.0);
  const auto direct = low_freq_initial(p, g) + high_freq(p, m, 0.0, g);
  CHECK(oracle::max_diff(u0, direct) < 1e-6 * direct.max_abs());
  CHECK(fam.time_derivative(0.1).has_value());
}

}
