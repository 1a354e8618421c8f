#pragma once

#include "pencilspec/types.hpp"

namespace pencilspec {

// Coefficient pair (p, sigma) of the pencil on an interval [a,b].
// p and the absolutely continuous part of sigma are piecewise-linear
// interpolants of uniform-grid samples; sigma additionally carries step
// discontinuities (x0, c) so that q = sigma' can hold delta terms.
// sigma is right-continuous at each jump.
struct CoefficientPair {
  double a = 0.0;
  double b = kPi;
  CVec p;              // samples of p on the uniform grid, size G >= 2
  CVec sigma;          // samples of the continuous part of sigma, size G
  std::vector<std::pair<double, Cplx>> jumps;  // (x0, height), a < x0 < b

  void validate() const;
  double dx() const { return (b - a) / double(p.size() - 1); }
};

Cplx eval_p(const CoefficientPair& cp, double x);
Cplx eval_sigma(const CoefficientPair& cp, double x);

// mean of p over [a,b]; trapezoid rule, exact for the interpolant.
Cplx mean_p(const CoefficientPair& cp);

// convenience constructors used all over the tests and the CLI
CoefficientPair make_free(double a = 0.0, double b = kPi, std::size_t grid = 129);
CoefficientPair sample_pair(double a, double b, std::size_t grid,
                            Cplx (*pf)(double), Cplx (*sf)(double));

}  // namespace pencilspec
