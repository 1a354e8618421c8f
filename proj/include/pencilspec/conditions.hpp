#pragma once

#include <vector>

#include "pencilspec/entire.hpp"
#include "pencilspec/forward.hpp"
#include "pencilspec/inverse.hpp"
#include "pencilspec/types.hpp"

namespace pencilspec {

// All of these are finite-section proxies: they inspect the data window that
// is actually present and cannot certify the infinite-dimensional property.

struct SCheck {
  bool ok = false;
  double min_value = 0.0;  // min over entries of |f1| + |f2|
  double min_ratio = 0.0;  // min of max(|f1|,|f2|) relative to the local scale
};

// The boundary functions must not vanish simultaneously on the subspectrum.
SCheck check_S(const Subspectrum& sub, const ExprPtr& f1, const ExprPtr& f2,
               double tol = 1e-9);

struct ACheck {
  bool ok = false;
  double max_im = 0.0;
  int n0 = 1;  // 1-based index from which all window values are simple
};

ACheck check_A(const Subspectrum& sub, double im_bound = 10.0);

struct GramDiag {
  // Completeness proxy: smallest eigenvalue of the frame-operator section of
  // the normalized family against the critical-density orthonormal reference
  // on (-h,h). 1 for a family that fills the window, 0 when directions of the
  // window are missing.
  double sigma_min = 0.0;
  // Riesz proxy: extreme-eigenvalue ratio of the unit-diagonal self Gram.
  double cond = 1.0;
  double self_min = 0.0;  // smallest eigenvalue of that normalized self Gram
};

// Exponential system e^{i lambda_n t} on (-halfwidth, halfwidth), derivative
// rows added for repeated values; the section keeps |Re lambda_n| <= T.
GramDiag gram_diagnostic(const Subspectrum& sub, double halfwidth, int T);

// Same normalization applied to already-assembled moment rows (no frame
// reference exists there, so sigma_min mirrors self_min).
GramDiag row_gram(const std::vector<HVector>& rows);

struct ConditionReport {
  SCheck s;
  ACheck a;
  GramDiag gram;
};

ConditionReport run_checks(const Subspectrum& sub, const ExprPtr& f1,
                           const ExprPtr& f2, double halfwidth = 2.0 * kPi,
                           int T = 32);

}  // namespace pencilspec
