#include "pencilspec/kernels.hpp"

#include <cmath>

#include "pencilspec/expmoment.hpp"

namespace pencilspec {

void BoundaryTriple::validate() const {
  if (K.empty() || K.size() % 2 == 0)
    throw SchemaError("triple: K must hold an odd number of samples");
  if (N.size() != K.size())
    throw SchemaError("triple: K and N sample counts differ");
}

BoundaryTriple extract_triple(const CoefficientPair& cp, int half_width,
                              const ForwardOpts& opts) {
  cp.validate();
  if (half_width < 1) throw SchemaError("extract_triple: half_width must be positive");
  if (std::abs((cp.b - cp.a) - kPi) > 1e-9)
    throw SchemaError("extract_triple: interval length must be pi");

  BoundaryTriple bt;
  bt.omega0 = mean_p(cp);
  bt.K.assign(2 * half_width + 1, 0.0);
  bt.N.assign(2 * half_width + 1, 0.0);
  for (int n = -half_width; n <= half_width; ++n) {
    const Cplx ln{double(n), 0.0};
    ForwardResult fr = boundary_S(cp, ln, opts);
    const Cplx rot = kPi * (ln - bt.omega0);
    if (n == 0) {
      // lambda*S vanishes like lambda at 0, so the sample is the limit value.
      bt.K[half_width] = std::sin(kPi * bt.omega0);
    } else {
      bt.K[n + half_width] = ln * fr.y - std::sin(rot);
    }
    bt.N[n + half_width] = fr.y1 - std::cos(rot);
  }
  return bt;
}

namespace {

// Sum of the cardinal series for the nu-th derivative of the transform:
// each integer sample c_n contributes c_n * E_nu(lambda - n) / (2 pi).
Cplx series_part(const CVec& c, Cplx lambda, int nu) {
  const int half = (int(c.size()) - 1) / 2;
  Cplx acc = 0.0;
  for (int n = -half; n <= half; ++n)
    acc += c[n + half] * exp_moment(nu, lambda - double(n), kPi);
  return acc / (2.0 * kPi);
}

// psi^(k) for k = 0, 1, 2: upward recurrence into the asymptotic regime,
// then the standard Bernoulli series.
Cplx polygamma(int k, Cplx x) {
  Cplx acc = 0.0;
  while (x.real() < 12.0) {
    if (k == 0)
      acc -= 1.0 / x;
    else if (k == 1)
      acc += 1.0 / (x * x);
    else
      acc -= 2.0 / (x * x * x);
    x += 1.0;
  }
  const Cplx inv = 1.0 / x, inv2 = inv * inv;
  if (k == 0)
    return acc + std::log(x) - 0.5 * inv -
           inv2 *
               (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240))));
  if (k == 1)
    return acc + inv + 0.5 * inv2 +
           inv * inv2 *
               (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30))));
  return acc - inv2 - inv * inv2 -
         inv2 * inv2 * (0.5 - inv2 * (1.0 / 6 - inv2 * (1.0 / 6)));
}

struct TailD {
  Cplx d0, d1, d2;  // D and its first two lambda derivatives
};

// D(lambda) = 2 sum_{n>T} 1/(n^2 - lambda^2)
//           = (psi(T+1+lambda) - psi(T+1-lambda)) / lambda.
// The psi form cancels badly near lambda = 0, so small arguments sum the
// series directly with a midpoint-rule remainder.
TailD tail_D(int T, Cplx lam) {
  TailD out;
  if (std::abs(lam) < 0.25) {
    const int N = T + 120;
    Cplx s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int n = T + 1; n <= N; ++n) {
      const Cplx q = 1.0 / (double(n) * double(n) - lam * lam);
      s0 += q;
      s1 += q * q;
      s2 += q * q * q;
    }
    const double e = N + 0.5;
    out.d0 = 2.0 * s0 + 2.0 / e + lam * lam * (2.0 / (3.0 * e * e * e));
    out.d1 = 4.0 * lam * s1 + 4.0 * lam / (3.0 * e * e * e);
    out.d2 = 4.0 * s1 + 16.0 * lam * lam * s2 + 4.0 / (3.0 * e * e * e);
    return out;
  }
  const Cplx xp = double(T + 1) + lam, xm = double(T + 1) - lam;
  out.d0 = (polygamma(0, xp) - polygamma(0, xm)) / lam;
  out.d1 = (polygamma(1, xp) + polygamma(1, xm) - out.d0) / lam;
  out.d2 = (polygamma(2, xp) - polygamma(2, xm) - 2.0 * out.d1) / lam;
  return out;
}

// Truncating the cardinal series drops sum_{|n|>T} c_n sinc(pi(lambda-n)).
// The samples of these transforms decay like kappa (-1)^n / n (the kernel
// does not vanish at the window ends), which makes the dropped tail a slowly
// converging O(1/T) term with the closed form
//   kappa * R(lambda),  R = -sin(pi lambda) D(lambda) / pi.
// Adding it back turns the O(1/T) evaluation error into O(1/T^3).
Cplx tail_part(const CVec& c, Cplx lambda, int nu) {
  const int T = (int(c.size()) - 1) / 2;
  // asymptotic fit needs a few samples; the psi form has poles at T+1, T+2,
  // ..., so callers beyond T - 1/2 only see the raw series
  if (T < 6 || std::abs(lambda.real()) > double(T) - 0.5 ||
      std::abs(lambda.imag()) > 0.5 * double(T))
    return 0.0;
  return tail_amplitude(c) * tail_R(T, lambda, nu);
}

}  // namespace

Cplx tail_R(int half_width, Cplx lambda, int nu) {
  if (half_width < 1) throw SchemaError("tail_R: bad window size");
  if (nu < 0 || nu > 2)
    throw SchemaError("tail_R: derivative order out of range");
  const TailD D = tail_D(half_width, lambda);
  const Cplx s = std::sin(kPi * lambda), co = std::cos(kPi * lambda);
  if (nu == 0) return -s * D.d0 / kPi;
  if (nu == 1) return -co * D.d0 - s * D.d1 / kPi;
  return kPi * s * D.d0 - 2.0 * co * D.d1 - s * D.d2 / kPi;
}

// Leading endpoint coefficient kappa = lim (-1)^n n c_n, fitted per side as
// kappa + beta/n over the outer half of the window and averaged.
Cplx tail_amplitude(const CVec& c) {
  if (c.empty() || c.size() % 2 == 0)
    throw SchemaError("tail_amplitude: bad sample vector");
  const int T = (int(c.size()) - 1) / 2;
  if (T < 6) return 0.0;  // too few samples for the asymptotic fit
  const int n0 = std::max(3, T / 2);
  Cplx kap = 0.0;
  for (int sgn : {1, -1}) {
    double a00 = 0.0, a01 = 0.0, a11 = 0.0;
    Cplx b0 = 0.0, b1 = 0.0;
    for (int n = n0; n <= T; ++n) {
      const int m = sgn * n;
      const double par = (m % 2 != 0) ? -1.0 : 1.0;
      const Cplx y = par * double(m) * c[m + T];
      a00 += 1.0;
      a01 += 1.0 / m;
      a11 += 1.0 / (double(m) * double(m));
      b0 += y;
      b1 += y / double(m);
    }
    kap += (a11 * b0 - a01 * b1) / (a00 * a11 - a01 * a01);
  }
  return kap / 2.0;
}

Cplx eval_g(const BoundaryTriple& bt, Cplx lambda, int nu) {
  bt.validate();
  if (nu < 0 || nu > 2) throw SchemaError("eval_g: derivative order out of range");
  const Cplx rot = kPi * (lambda - bt.omega0);
  const double shift = nu * kPi / 2.0;
  const double scale = std::pow(kPi, nu);
  return scale * std::sin(rot + shift) + series_part(bt.K, lambda, nu) +
         tail_part(bt.K, lambda, nu);
}

Cplx eval_S(const BoundaryTriple& bt, Cplx lambda) {
  if (std::abs(lambda) < 1e-8) return eval_g(bt, lambda, 1);
  return eval_g(bt, lambda, 0) / lambda;
}

Cplx eval_S1(const BoundaryTriple& bt, Cplx lambda, int nu) {
  bt.validate();
  if (nu < 0 || nu > 2) throw SchemaError("eval_S1: derivative order out of range");
  const Cplx rot = kPi * (lambda - bt.omega0);
  const double scale = std::pow(kPi, nu);
  // Derivatives of cos pick up the quarter-turn phase per order.
  return scale * std::cos(rot + nu * kPi / 2.0) + series_part(bt.N, lambda, nu) +
         tail_part(bt.N, lambda, nu);
}

Cplx eval_S_deriv(const BoundaryTriple& bt, Cplx lambda) {
  if (std::abs(lambda) < 1e-8) return eval_g(bt, lambda, 2) / 2.0;
  return (eval_g(bt, lambda, 1) * lambda - eval_g(bt, lambda, 0)) / (lambda * lambda);
}

}  // namespace pencilspec
