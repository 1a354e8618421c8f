#pragma once

#include <utility>
#include <vector>

#include "pencilspec/coefficients.hpp"
#include "pencilspec/entire.hpp"
#include "pencilspec/forward.hpp"
#include "pencilspec/kernels.hpp"
#include "pencilspec/types.hpp"

namespace pencilspec {

// Element of L2(-pi,pi)^2 stored by integer-frequency samples of the two
// component transforms, index n + T for n = -T..T. Inner products conjugate
// the first argument and carry the 2 pi normalization of the frequency basis.
struct HVector {
  CVec first;
  CVec second;

  int half() const { return (int(first.size()) - 1) / 2; }
};

Cplx hv_inner(const HVector& g, const HVector& h);

// One interpolation row (v_k, u) + tail terms = w_k. `lambda` and `nu`
// identify the point and the derivative order the row came from. The window
// cuts each kernel's cardinal series at |n| = T; the dropped endpoint tails
// enter the rows through two extra amplitude unknowns with the closed-form
// coefficients stored in tail_first/tail_second (see tail_R).
struct MomentSystem {
  int T = 0;
  Cplx omega0_mod1 = 0.0;
  std::vector<HVector> rows;
  CVec rhs;
  CVec row_lambda;
  std::vector<int> row_nu;
  CVec tail_first;   // per-row coefficient of the first-component amplitude
  CVec tail_second;  // per-row coefficient of the second-component amplitude
};

// Assembles the interpolation conditions carried by a subspectrum of the
// boundary problem (f1, f2). Entries with |lambda| > T + 1/2 are dropped (the
// endpoint-tail model has poles at T+1, T+2, ...); equal values must be
// adjacent and produce derivative rows of increasing order. A row pinning the
// analytic limit at lambda = 0 is always prepended.
MomentSystem build_moment_system(const Subspectrum& sub, const ExprPtr& f1,
                                 const ExprPtr& f2, int T);

struct SolveResult {
  HVector u;
  double ridge = 0.0;
  // Spectrum of the normalized row Gram (diagnostic for the data itself).
  double row_gram_min = 0.0;
  double row_gram_cond = 0.0;
  // Smallest-to-largest eigenvalue ratio of the normal matrix restricted to
  // columns the rows actually touch; near zero means the data cannot
  // determine the unknown even on its active components.
  double active_min_rel = 0.0;
  bool complete = false;
};

// Regularized least squares for the kernel-sample vector. `completeness_tol`
// is the active_min_rel threshold below which `complete` is reported false.
SolveResult solve_u(const MomentSystem& ms, double ridge_scale = 1e-10,
                    double completeness_tol = 1e-8);

// Packs the solved samples back into the boundary triple gauge.
BoundaryTriple reconstruct_triple(const HVector& u, Cplx omega0);

// Zeros of lambda*S(pi, lambda) near k + omega0 for k = -count..-1, 1..count,
// Newton-refined, sorted by (Re, Im), equal values adjacent. The artificial
// zero of lambda*S at the origin is discarded unless S itself vanishes there.
CVec locate_thetas(const BoundaryTriple& bt, int count);

// Dirichlet eigenvalue theta_n with the derivative order and the generalized
// norming value attached: value = residue of (z - theta_n)^nu / S(pi, z)
// divided by S^[1](pi, theta_n).
struct WeylRow {
  Cplx theta = 0.0;
  int nu = 0;
  Cplx value = 0.0;
};

struct WeylData {
  Cplx omega0 = 0.0;
  CVec thetas;
  std::vector<WeylRow> rows;
};

WeylData weyl_residues(const BoundaryTriple& bt, const CVec& thetas);

// Replaces the representative omega0 (known mod 1) with the true mean, fixing
// the sign of both kernels when the two differ by an odd integer.
BoundaryTriple parity_fix(const BoundaryTriple& bt, Cplx omega0_true);

// The constant h = sigma_true - sigma_candidate recovered by comparing
// quasi-derivative traces at off-spectrum probe points; throws when the
// probe values do not agree to `spread_tol`. An empty `probes` list means
// ten default probes: integer points (sample-exact for the triple) where
// |S| stays above 1e-4, else offsets omega0 + j + 1/2 away from the zeros
// of S; every probe must keep |S| > 1e-6.
Cplx sigma_shift(const BoundaryTriple& bt, const CoefficientPair& candidate,
                 const CVec& probes = {}, double spread_tol = 1e-4,
                 double* spread_out = nullptr, const ForwardOpts& opts = {});

}  // namespace pencilspec
