#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "whitham/errors.hpp"
#include "whitham/symbols.hpp"

using namespace whitham;

TEST_SUITE("symbols") {

// sqrt(tanh(xi)/xi) to 30 digits, computed with mpmath
TEST_CASE("whitham symbol matches high precision values") {
  const auto m = Symbol::whitham();
  CHECK(m(0.0) == 1.0);
  CHECK(m(0.5) == doctest::Approx(0.961371059747493916).epsilon(1e-15));
  CHECK(m(1.0) == doctest::Approx(0.872693620897829692).epsilon(1e-15));
  CHECK(m(3.0) == doctest::Approx(0.575920930246137883).epsilon(1e-15));
  CHECK(m(10.0) == doctest::Approx(0.316227765365043928).epsilon(1e-15));
}

TEST_CASE("whitham symbol near zero is smooth") {
  const auto m = Symbol::whitham();
  for (double xi : {1e-9, 1e-6, 1e-4, 1e-2}) {
    // tanh(x)/x = 1 - x^2/3 + 2x^4/15 ...
    const double series = std::sqrt(1.0 - xi * xi / 3.0 + 2.0 * std::pow(xi, 4) / 15.0);
    CHECK(m(xi) == doctest::Approx(series).epsilon(1e-12));
  }
}

TEST_CASE("built-in symbols are even bit for bit") {
  for (const char* s : {"whitham", "kdv", "bo", "zero", "fkdv:1.5", "fkdv:0.3"}) {
    const auto m = Symbol::parse(s);
    for (double xi = 0.013; xi < 500.0; xi *= 1.37) CHECK(m(xi) == m(-xi));
  }
}

TEST_CASE("power symbols") {
  CHECK(Symbol::kdv()(3.0) == 9.0);
  CHECK(Symbol::bo()(-2.5) == 2.5);
  CHECK(Symbol::zero()(7.0) == 0.0);
  CHECK(Symbol::fkdv(1.5)(4.0) == doctest::Approx(8.0));
  CHECK(Symbol::fkdv(0.0)(0.0) == 1.0);
  CHECK_THROWS_AS(Symbol::fkdv(-1.0), ConfigError);
}

TEST_CASE("spelling round trip") {
  for (const char* s : {"whitham", "kdv", "bo", "zero"}) CHECK(Symbol::parse(s).spelling() == s);
  CHECK(Symbol::parse(Symbol::fkdv(1.25).spelling())(2.0) == Symbol::fkdv(1.25)(2.0));
  CHECK_THROWS_AS(Symbol::parse("airy"), ConfigError);
  CHECK_THROWS_AS(Symbol::parse("fkdv:x"), ConfigError);
}

TEST_CASE("declared metadata") {
  CHECK(Symbol::whitham().growth_exponent() == 0.0);
  CHECK(Symbol::kdv().growth_exponent() == 2.0);
  REQUIRE(Symbol::kdv().gamma().has_value());
  CHECK(*Symbol::kdv().gamma() == 2.0);
  CHECK(Symbol::fkdv(1.5).growth_exponent() == 1.5);
}

TEST_CASE("custom table interpolates and refuses to extrapolate") {
  const auto m = Symbol::custom({0.0, 1.0, 2.0}, {1.0, 0.5, 0.25});
  CHECK(m(0.5) == doctest::Approx(0.75));
  CHECK(m(-1.5) == doctest::Approx(0.375));
  CHECK(m(2.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(m(2.5), OutOfRangeError);
}

TEST_CASE("custom symbol from file") {
  const auto path = std::filesystem::temp_directory_path() / "whitham_custom_symbol.txt";
  {
    std::ofstream f(path);
    f << "# xi m\n0 1\n1 0.5\n4 0.2\n";
  }
  const auto m = Symbol::parse("custom:" + path.string());
  CHECK(m(2.5) == doctest::Approx(0.35));
  CHECK(m.kind() == SymbolKind::custom);
  std::filesystem::remove(path);
  CHECK_THROWS(Symbol::parse("custom:/nonexistent/table.txt"));
}

TEST_CASE("condition checker recovers power law exponents") {
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    const auto rep = check_symbol_conditions(Symbol::fkdv(alpha), 1e3, 256);
    CHECK(rep.fitted_exponent == doctest::Approx(alpha).epsilon(1e-10));
    CHECK(rep.evenness_defect == 0.0);
    CHECK(rep.growth_consistent);
  }
}

TEST_CASE("kdv is flagged outside the admissible gamma range") {
  CHECK(check_symbol_conditions(Symbol::kdv(), 1e3, 256).gamma_outside_range);
  CHECK_FALSE(check_symbol_conditions(Symbol::whitham(), 1e3, 256).gamma_outside_range);
}

TEST_CASE("whitham decays like xi^-1/2") {
  const auto rep = check_symbol_conditions(Symbol::whitham(), 1e3, 256);
  CHECK(std::abs(rep.fitted_exponent + 0.5) < 0.01);
  CHECK(rep.evenness_defect == 0.0);
}

}
