#include <cmath>
#include <complex>

#include "doctest.h"
#include "pencilspec/entire.hpp"
#include "pencilspec/types.hpp"

using namespace pencilspec;

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int t = 2; t <= n; ++t) f *= t;
  return f;
}

// nu-th scaled derivative of sin(a z + b): a^nu sin(a z + b + nu pi/2) / nu!
Cplx sin_deriv(Cplx a, Cplx b, Cplx z, int nu) {
  return std::pow(a, nu) * std::sin(a * z + b + double(nu) * kPi / 2.0) /
         factorial(nu);
}

}  // namespace

TEST_SUITE("entire") {

TEST_CASE("leaf evaluation") {
  CHECK(std::abs(eval(ex_const({2.0, -1.0}), 5.0) - Cplx(2.0, -1.0)) < 1e-15);
  CHECK(std::abs(eval(ex_lambda(), {0.3, 0.7}) - Cplx(0.3, 0.7)) < 1e-15);
}

TEST_CASE("trig and exp against the standard library") {
  const Cplx z{0.4, -0.2};
  const Cplx a{2.0, 0.5}, b{-1.0, 0.0};
  CHECK(std::abs(eval(ex_sin(a, b), z) - std::sin(a * z + b)) < 1e-14);
  CHECK(std::abs(eval(ex_cos(a, b), z) - std::cos(a * z + b)) < 1e-14);
  CHECK(std::abs(eval(ex_exp(a, b), z) - std::exp(a * z + b)) < 1e-14);
}

TEST_CASE("poly is evaluated in ascending powers") {
  // 1 - 2 z + 3 z^2 at z = 2i
  ExprPtr f = ex_poly({1.0, -2.0, 3.0});
  const Cplx z{0.0, 2.0};
  CHECK(std::abs(eval(f, z) - (Cplx(1.0) - 2.0 * z + 3.0 * z * z)) < 1e-14);
}

TEST_CASE("sum, product and neg compose") {
  // f = -(z * sin(z) + 2)
  ExprPtr f = ex_neg(ex_sum(
      {ex_product({ex_lambda(), ex_sin(1.0, 0.0)}), ex_const(2.0)}));
  const Cplx z = 1.3;
  CHECK(std::abs(eval(f, z) - (-(z * std::sin(z) + 2.0))) < 1e-14);
}

TEST_CASE("scaled derivatives of an affine sine") {
  const Cplx a{1.5, 0.0}, b{0.2, 0.0};
  ExprPtr f = ex_sin(a, b);
  const Cplx z{0.7, 0.1};
  for (int nu = 0; nu <= 5; ++nu)
    CHECK(std::abs(deriv(f, z, nu) - sin_deriv(a, b, z, nu)) < 1e-12);
}

TEST_CASE("polynomial derivatives are exact") {
  // f = z^3: f^{(2)} = 6 z, scaled by 1/2! -> 3 z
  ExprPtr f = ex_poly({0.0, 0.0, 0.0, 1.0});
  CHECK(std::abs(deriv(f, 2.0, 2) - Cplx(6.0)) < 1e-14);
  CHECK(std::abs(deriv(f, 2.0, 3) - Cplx(1.0)) < 1e-14);  // 6/3! = 1
  CHECK(std::abs(deriv(f, 2.0, 4)) < 1e-14);              // degree exhausted
}

TEST_CASE("product rule carries the 1/nu! scaling") {
  // f = z * sin(z): f' = sin z + z cos z, f'' = 2 cos z - z sin z
  ExprPtr f = ex_product({ex_lambda(), ex_sin(1.0, 0.0)});
  const Cplx z = 0.9;
  const Cplx d1 = std::sin(z) + z * std::cos(z);
  const Cplx d2 = 2.0 * std::cos(z) - z * std::sin(z);
  CHECK(std::abs(deriv(f, z, 1) - d1) < 1e-13);
  CHECK(std::abs(deriv(f, z, 2) - d2 / 2.0) < 1e-13);
}

TEST_CASE("derivative of a sum and of neg") {
  ExprPtr f = ex_sum({ex_poly({0.0, 0.0, 1.0}), ex_neg(ex_cos(1.0, 0.0))});
  // f = z^2 - cos z: f' = 2z + sin z
  const Cplx z = 0.25;
  CHECK(std::abs(deriv(f, z, 1) - (2.0 * z + std::sin(z))) < 1e-13);
}

TEST_CASE("solver nodes evaluate through the registry") {
  clear_solvers();
  CHECK(!solver_registered("probe"));
  register_solver("probe", [](Cplx z) { return z * z + 1.0; });
  CHECK(solver_registered("probe"));
  ExprPtr f = ex_solver("probe");
  const Cplx z{1.0, 0.5};
  CHECK(std::abs(eval(f, z) - (z * z + 1.0)) < 1e-14);
  // memoized: a second evaluation at the same point returns the same value
  CHECK(std::abs(eval(f, z) - (z * z + 1.0)) < 1e-14);
  clear_solvers();
  CHECK_THROWS_AS(eval(f, z), SchemaError);
}

TEST_CASE("contour derivatives of solver trees match symbolic ones") {
  clear_solvers();
  register_solver("sinlike", [](Cplx z) { return std::sin(2.0 * z + 0.3); });
  ExprPtr viasolver = ex_solver("sinlike");
  ExprPtr symbolic = ex_sin(2.0, 0.3);
  const Cplx z{0.4, -0.1};
  for (int nu = 1; nu <= 4; ++nu)
    CHECK(std::abs(deriv(viasolver, z, nu) - deriv(symbolic, z, nu)) < 1e-9);
  clear_solvers();
}

TEST_CASE("contour radius and node count are honored") {
  clear_solvers();
  register_solver("poly3", [](Cplx z) { return z * z * z; });
  ExprPtr f = ex_solver("poly3");
  // z^3 at 1: f'' / 2! = 3
  CHECK(std::abs(deriv(f, 1.0, 2, 0.5, 64) - Cplx(3.0)) < 1e-10);
  clear_solvers();
}

TEST_CASE("derivative order is capped") {
  CHECK_THROWS_AS(deriv(ex_sin(1.0, 0.0), 0.0, 9), SchemaError);
  CHECK_THROWS_AS(deriv(ex_sin(1.0, 0.0), 0.0, -1), SchemaError);
}

}  // TEST_SUITE
