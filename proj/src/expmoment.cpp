#include "pencilspec/expmoment.hpp"

#include <cmath>

namespace pencilspec {

Cplx exp_moment(int j, Cplx mu, double h) {
  if (j < 0) throw SchemaError("exp_moment: negative derivative order");
  if (!(h > 0.0)) throw SchemaError("exp_moment: halfwidth must be positive");
  // The upward recurrence divides by mu once per order and cancels badly when
  // |mu| h is small relative to j, so the series region widens with j.
  if (std::abs(mu) * h < std::max(0.5, 0.75 * j)) {
    // Taylor series around mu = 0. Odd powers of t integrate to zero, so
    //   E_j(mu) = sum_{m, j+m even} i^{j+m} mu^m/m! * 2 h^{j+m+1}/(j+m+1)
    // and i^{j+m} = (-1)^{(j+m)/2} is real on the surviving terms.
    Cplx acc = 0.0;
    Cplx mupow = 1.0;  // mu^m / m!
    double hp = std::pow(h, j + 1);
    for (int m = 0; m <= 90; ++m) {
      if ((j + m) % 2 == 0) {
        double sgn = ((j + m) / 2) % 2 == 0 ? 1.0 : -1.0;
        acc += sgn * mupow * (2.0 * hp / (j + m + 1));
      }
      mupow *= mu / double(m + 1);
      hp *= h;
      if (m > j + 6 && std::abs(mupow) * hp < 1e-22) break;
    }
    return acc;
  }
  // Away from zero: mu*E_j + j*E_{j-1} = 2 h^j sin(h mu + j pi/2), the Leibniz
  // expansion of d^j/dmu^j [mu * E_0 = 2 sin(h mu)], run as an upward recurrence.
  Cplx e = 2.0 * std::sin(h * mu) / mu;
  double hj = 1.0;
  for (int m = 1; m <= j; ++m) {
    hj *= h;
    Cplx rhs = 2.0 * hj * std::sin(h * mu + m * kPi / 2.0);
    e = (rhs - double(m) * e) / mu;
  }
  return e;
}

Cplx sinc_pi(Cplx mu) {
  Cplx z = kPi * mu;
  if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

}  // namespace pencilspec
