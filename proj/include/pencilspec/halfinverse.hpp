#pragma once

#include <utility>

#include "pencilspec/coefficients.hpp"
#include "pencilspec/entire.hpp"
#include "pencilspec/forward.hpp"
#include "pencilspec/inverse.hpp"
#include "pencilspec/recovery.hpp"

namespace pencilspec {

// Partial inverse problem on (0, 2pi): the coefficients are known on the
// right half (pi, 2pi) and the Dirichlet spectrum mu_k of the full interval
// is given, together with the mean of p over the known half (which pins
// omega0 mod 1 through the mu_k asymptotics mu_k ~ k/2 + const).
struct HalfProblem {
  CoefficientPair known_half;  // on (pi, 2pi)
  CVec spectrum;               // sorted by Re, multiplicities adjacent
  Cplx known_mean = 0.0;       // (1/pi) * integral of p over (pi, 2pi)

  void validate() const;
};

// phi solves the pencil on the known half with phi(2pi) = 0, phi^[1](2pi) = 1
// (backward data); the pair (phi(pi, .), phi^[1](pi, .)) turns the matching
// condition at the midpoint into entire boundary functions for the left half.
std::pair<Cplx, Cplx> phi_at_midpoint(const CoefficientPair& known_half,
                                      Cplx lambda,
                                      const ForwardOpts& opts = {});

// f1 = -phi(pi, .), f2 = phi^[1](pi, .) as memoized solver-backed expression
// nodes (fresh registry tags per call).
std::pair<ExprPtr, ExprPtr> midpoint_matching_exprs(
    const CoefficientPair& known_half, const ForwardOpts& opts = {});

// Robust constant in mu_k = k/2 + c + o(1): median of tail-block averages of
// mu_k - k/2, with symmetric +-k pairs averaged first so the odd-in-k part of
// the remainder cancels. omega0 = 2c - known_mean, returned mod 1.
Cplx estimate_omega0_mod1(const CVec& spectrum, Cplx known_mean,
                          double* spread_out = nullptr);

struct HalfResult {
  CoefficientPair left;   // recovered (p, sigma) on (0, pi), absolute gauge
  BoundaryTriple triple;  // parity-fixed boundary data of the left half
  RecoveryResult rec;
  Cplx sigma_constant = 0.0;  // gauge constant restored by sigma_shift
  Cplx omega0_mod1 = 0.0;
  double tail_spread = 0.0;
};

HalfResult solve_half(const HalfProblem& hp, const RecoveryConfig& cfg,
                      int T, const ForwardOpts& opts = {});

// Joins two half-interval coefficient pairs into one problem on (0, 2pi).
// sigma is made continuous at the seam by shifting the right samples and the
// true offset is restored as an explicit jump, so no spurious point mass
// appears from interpolation.
CoefficientPair stitch_halves(const CoefficientPair& left,
                              const CoefficientPair& right, int grid = 513);

}  // namespace pencilspec
