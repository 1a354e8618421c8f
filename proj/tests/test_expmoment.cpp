#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "pencilspec/expmoment.hpp"
#include "pencilspec/types.hpp"

using namespace pencilspec;

namespace {

// Independent oracle: composite Simpson for int_{-h}^{h} (i t)^j e^{i mu t} dt.
// The integrand is entire and bounded on the segment, so Simpson at a few
// thousand panels is exact to ~1e-12 for the parameter ranges below.
Cplx brute_moment(int j, Cplx mu, double h, int panels = 24000) {
  const Cplx I{0.0, 1.0};
  auto f = [&](double t) { return std::pow(I * t, j) * std::exp(I * mu * t); };
  const double dt = 2.0 * h / (2.0 * panels);
  Cplx acc = f(-h) + f(h);
  for (int k = 1; k < 2 * panels; ++k)
    acc += f(-h + k * dt) * (k % 2 ? 4.0 : 2.0);
  return acc * dt / 3.0;
}

}  // namespace

TEST_SUITE("expmoment") {

TEST_CASE("order zero closed form") {
  const double h = kPi;
  for (double mu : {0.3, 2.0, 17.5}) {
    const Cplx expect = 2.0 * std::sin(h * mu) / mu;
    CHECK(std::abs(exp_moment(0, mu, h) - expect) < 1e-13);
  }
  // removable point
  CHECK(std::abs(exp_moment(0, 0.0, h) - Cplx(2.0 * h)) < 1e-13);
  CHECK(std::abs(exp_moment(0, 1e-12, h) - Cplx(2.0 * h)) < 1e-10);
}

TEST_CASE("quadrature oracle sweep") {
  const std::vector<Cplx> mus = {0.0,          0.01,         {0.3, 0.2},
                                 3.0,          {10.0, 1.0},  -7.5,
                                 {0.0, -2.0},  {25.0, 0.0},  {-4.0, 3.0}};
  for (double h : {kPi, 1.0, 0.25})
    for (int j : {0, 1, 2, 3, 5, 8})
      for (const Cplx& mu : mus) {
        const Cplx got = exp_moment(j, mu, h);
        const Cplx want = brute_moment(j, mu, h);
        // the oracle's own Simpson error grows with |mu|^4 h^j, hence 1e-8
        const double scale = std::max(1.0, std::abs(want));
        CHECK(std::abs(got - want) / scale < 1e-8);
      }
}

TEST_CASE("three-term identity between orders") {
  // mu E_j + j E_{j-1} = 2 h^j sin(h mu + j pi/2), from one integration by
  // parts; checked on values produced by both evaluation branches.
  const double h = kPi;
  for (const Cplx& mu : {Cplx(0.05), Cplx(1.7, 0.4), Cplx(12.0)})
    for (int j = 1; j <= 8; ++j) {
      const Cplx lhs =
          mu * exp_moment(j, mu, h) + double(j) * exp_moment(j - 1, mu, h);
      const Cplx rhs = 2.0 * std::pow(h, j) *
                       std::sin(h * mu + double(j) * kPi / 2.0);
      CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("reflection symmetry in mu") {
  // E_j(-mu) = (-1)^j conj(E_j(conj(mu)))
  for (const Cplx& mu : {Cplx(0.4), Cplx(2.0, -1.0), Cplx(9.0, 0.3)})
    for (int j = 0; j <= 6; ++j) {
      const Cplx a = exp_moment(j, -mu, kPi);
      const Cplx b = double(j % 2 ? -1 : 1) *
                     std::conj(exp_moment(j, std::conj(mu), kPi));
      CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("branch seam is continuous") {
  // The evaluator switches between a Taylor series and the recurrence; sweep
  // |mu| h across the switch and compare neighbours against the oracle.
  const double h = kPi;
  for (int j : {0, 2, 5}) {
    for (double r = 0.05; r < 3.0; r += 0.031) {
      const Cplx mu{r, 0.1};
      const Cplx got = exp_moment(j, mu, h);
      const Cplx want = brute_moment(j, mu, h);
      CHECK(std::abs(got - want) < 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("sinc_pi normalization") {
  CHECK(std::abs(sinc_pi(0.0) - Cplx(1.0)) < 1e-15);
  CHECK(std::abs(sinc_pi(1.0)) < 1e-15);
  CHECK(std::abs(sinc_pi(-3.0)) < 1e-15);
  CHECK(std::abs(sinc_pi(0.5) - Cplx(2.0 / kPi)) < 1e-14);
  // relation to the order-zero moment: E_0(mu, pi) = 2 pi sinc_pi(mu)
  const Cplx mu{0.7, -0.2};
  CHECK(std::abs(exp_moment(0, mu, kPi) - 2.0 * kPi * sinc_pi(mu)) < 1e-12);
}

TEST_CASE("rejects bad arguments") {
  CHECK_THROWS_AS(exp_moment(-1, 1.0, kPi), SchemaError);
  CHECK_THROWS_AS(exp_moment(0, 1.0, 0.0), SchemaError);
}

}  // TEST_SUITE
