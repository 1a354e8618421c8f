#pragma once

#include "pencilspec/coefficients.hpp"
#include "pencilspec/forward.hpp"
#include "pencilspec/types.hpp"

namespace pencilspec {

// Integer-sample representation of the boundary pair
//   lambda * S(pi, lambda)  = sin(pi (lambda - omega0)) + integral of K against e^{i lambda t},
//   S^[1](pi, lambda)       = cos(pi (lambda - omega0)) + integral of N against e^{i lambda t},
// with both kernels supported on (-pi, pi). K[n + half] and N[n + half] hold the
// transform values at integer frequencies n = -half..half, which determine the
// transforms everywhere by the cardinal sinc series.
struct BoundaryTriple {
  Cplx omega0 = 0.0;
  CVec K;
  CVec N;

  int half() const { return (int(K.size()) - 1) / 2; }
  void validate() const;
};

// Samples the solution at integer lambda and subtracts the free-problem part.
// The n = 0 sample of the K row uses the analytic limit of lambda*S at 0.
BoundaryTriple extract_triple(const CoefficientPair& cp, int half_width,
                              const ForwardOpts& opts = {});

// g(lambda) = lambda * S(pi, lambda) evaluated from the triple; nu = 0, 1, 2
// give the function and its first two derivatives (not scaled by 1/nu!).
Cplx eval_g(const BoundaryTriple& bt, Cplx lambda, int nu = 0);

// S(pi, lambda) and S^[1](pi, lambda); the removable point lambda = 0 is
// handled by the derivative limit.
Cplx eval_S(const BoundaryTriple& bt, Cplx lambda);
Cplx eval_S1(const BoundaryTriple& bt, Cplx lambda, int nu = 0);

// d/dlambda of S(pi, lambda).
Cplx eval_S_deriv(const BoundaryTriple& bt, Cplx lambda);

// The window cuts the cardinal series at |n| = half; kernels with endpoint
// jumps leave samples decaying like kappa (-1)^n / n, so the dropped part
// has the closed form kappa * R with
//   R(lambda) = -sin(pi lambda) / pi * 2 sum_{n > half} 1 / (n^2 - lambda^2).
// tail_R returns R and its first two derivatives (nu = 0, 1, 2); it has poles
// at |lambda| = half+1, half+2, ... like the sum itself. tail_amplitude fits
// kappa from the outer samples; both feed the evaluators above and the
// moment-system tail columns.
Cplx tail_R(int half_width, Cplx lambda, int nu = 0);
Cplx tail_amplitude(const CVec& samples);

}  // namespace pencilspec
