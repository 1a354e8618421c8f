#pragma once

#include <string>
#include <vector>

#include "pencilspec/coefficients.hpp"
#include "pencilspec/forward.hpp"
#include "pencilspec/inverse.hpp"

namespace pencilspec {

// Coefficient recovery from Weyl-type data. This is NOT the reconstruction
// method the rest of the pipeline is quoted from: the step "find (p, q) from
// the spectral data" is delegated here to a regularized output-least-squares
// fit with the forward solver in the loop. It minimizes
//
//   sum_k |S_cand(pi, theta_k)|^2
//     + sum_k |M_cand,k - M_k|^2 / (1+|k|)^2
//     + tikhonov * |coeffs|^2
//
// over cosine-series coefficients of p and sigma via damped Gauss-Newton with
// a finite-difference Jacobian. sigma is recovered in the gauge sigma(0) = 0;
// the constant is restored later from the quasi-derivative trace
// (sigma_shift). Rows of derivative order >= 1 constrain the fit only through
// the repeated zero of S at their theta.
struct RecoveryConfig {
  int basis_dim = 8;       // cosine modes for p; sigma gets basis_dim-1
  int max_iter = 40;
  double tikhonov = 1e-8;
  std::string init = "asymptotic";  // or "zero"
  bool complex_coeffs = false;
  int step_atoms = 0;  // extra jump terms in sigma: (height, location) pairs
  int grid = 257;
  ForwardOpts fwd;
};

struct RecoveryResult {
  CoefficientPair cp;
  double misfit = 0.0;  // data part of the objective at the solution
  int iterations = 0;
  std::vector<double> objective;  // accepted-step trace, non-increasing
  Cplx omega0_est = 0.0;          // Cesaro estimate from theta asymptotics
};

RecoveryResult recover_pq(const WeylData& wd, const RecoveryConfig& cfg = {});

// Signed enumeration (…,-2,-1,1,2,…) of a sorted-by-real-part list against
// the lattice k*spacing + const with the k = 0 slot absent; picks the cut
// that makes the offsets most nearly constant.
std::vector<int> enumerate_skip_zero(const CVec& values, double spacing);

}  // namespace pencilspec
