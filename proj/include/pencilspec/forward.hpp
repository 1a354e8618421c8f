#pragma once

#include "pencilspec/coefficients.hpp"
#include "pencilspec/entire.hpp"

namespace pencilspec {

// State of the regularized first-order system: y and the quasi-derivative
// y^[1] = y' - sigma*y. Both stay continuous across sigma jumps, which is the
// whole point of the quasi-derivative formulation.
struct Boundary {
  Cplx y;
  Cplx y1;
};

struct ForwardOpts {
  double base_density = 4096.0 / kPi;  // mesh steps per unit x
  double phase_density = 240.0;        // extra steps per unit x per |lambda|
  bool variational = false;            // also propagate d/dlambda
};

struct ForwardResult {
  Cplx y{};
  Cplx y1{};
  Cplx dy{};   // d y / d lambda (variational only)
  Cplx dy1{};  // d y^[1] / d lambda
};

// RK4 over a jump-aligned mesh; direction backward integrates from b to a
// with data given at b.
ForwardResult integrate(const CoefficientPair& cp, Cplx lambda, Boundary init,
                        bool backward = false, const ForwardOpts& opts = {});

// canonical solutions at the right endpoint: S has (y,y1)=(0,1) at a,
// C has (1,0).
ForwardResult boundary_S(const CoefficientPair& cp, Cplx lambda,
                         const ForwardOpts& opts = {});
ForwardResult boundary_C(const CoefficientPair& cp, Cplx lambda,
                         const ForwardOpts& opts = {});

// C*S^[1] - C^[1]*S at b; identically 1 in exact arithmetic, so the distance
// from 1 doubles as an integrator accuracy monitor.
Cplx wronskian(const CoefficientPair& cp, Cplx lambda,
               const ForwardOpts& opts = {});

// Delta(lambda) = f1(lambda) S^[1](b,lambda) + f2(lambda) S(b,lambda)
Cplx char_fn(const CoefficientPair& cp, const ExprPtr& f1, const ExprPtr& f2,
             Cplx lambda, const ForwardOpts& opts = {});
// value and d/dlambda in one pass
std::pair<Cplx, Cplx> char_fn_d(const CoefficientPair& cp, const ExprPtr& f1,
                                const ExprPtr& f2, Cplx lambda,
                                const ForwardOpts& opts = {});

struct SearchBox {
  double re0, re1, im0, im1;
};

struct EigOpts {
  double cluster_tol = 1e-7;  // roots closer than this merge into one cluster
  int max_depth = 64;
  int max_jitter = 5;         // retries when a zero sits on a contour
  std::vector<Cplx> hints;    // optional seeds (k + omega0 pattern)
  ForwardOpts fwd;
};

// Zeros of Delta inside the box via the argument principle: winding numbers
// from trapezoid quadrature of Delta'/Delta over subdivided rectangles, Newton
// refinement per root, multiplicity = winding of the final isolating circle.
// Output sorted by (Re, Im), multiple roots repeated adjacently.
CVec eigenvalues(const CoefficientPair& cp, const ExprPtr& f1,
                 const ExprPtr& f2, const SearchBox& box,
                 const EigOpts& opts = {});

// Newton polish of a located simple root, typically with a finer mesh than the
// search used. Returns the input unchanged if the iteration fails to contract.
Cplx refine_eigenvalue(const CoefficientPair& cp, const ExprPtr& f1,
                       const ExprPtr& f2, Cplx z0,
                       const ForwardOpts& opts = {});

struct Subspectrum {
  CVec values;       // sorted by real part, multiplicities adjacent
  Cplx omega0_mod1;  // representative with Re in [0,1)
};

}  // namespace pencilspec
