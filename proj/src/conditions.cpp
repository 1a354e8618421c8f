#include "pencilspec/conditions.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pencilspec/expmoment.hpp"

namespace pencilspec {

SCheck check_S(const Subspectrum& sub, const ExprPtr& f1, const ExprPtr& f2,
               double tol) {
  if (!f1 || !f2) throw SchemaError("check_S: null boundary function");
  if (sub.values.empty()) throw SchemaError("check_S: empty subspectrum");
  SCheck out;
  out.ok = true;
  out.min_value = 1e300;
  out.min_ratio = 1e300;
  for (const Cplx& lam : sub.values) {
    const double a1 = std::abs(eval(f1, lam));
    const double a2 = std::abs(eval(f2, lam));
    // Scale against nearby values so a globally tiny f does not pass or
    // fail for trivial normalization reasons.
    double scale = 0.0;
    for (double d : {0.0, 0.5, -0.5, 1.0, -1.0}) {
      scale = std::max(scale, std::abs(eval(f1, lam + d)));
      scale = std::max(scale, std::abs(eval(f2, lam + d)));
    }
    scale = std::max(scale, 1e-300);
    const double ratio = std::max(a1, a2) / scale;
    out.min_value = std::min(out.min_value, a1 + a2);
    out.min_ratio = std::min(out.min_ratio, ratio);
    if (ratio <= tol) out.ok = false;
  }
  return out;
}

ACheck check_A(const Subspectrum& sub, double im_bound) {
  if (sub.values.empty()) throw SchemaError("check_A: empty subspectrum");
  ACheck out;
  out.max_im = 0.0;
  out.n0 = 1;
  for (std::size_t i = 0; i < sub.values.size(); ++i) {
    out.max_im = std::max(out.max_im, std::abs(sub.values[i].imag()));
    if (i > 0 && sub.values[i] == sub.values[i - 1])
      out.n0 = int(i) + 2;  // first 1-based index past the repetition
  }
  out.ok = out.max_im <= im_bound;
  return out;
}

namespace {

struct Entry {
  Cplx lambda;
  int nu;
};

// <d^a e(lam_i), d^b e(lam_j)> on (-h,h) with scaled derivatives: conjugating
// the first argument flips (it)^a to (-it)^a, hence the (-1)^a.
Cplx pair_inner(const Entry& ei, const Entry& ej, double h) {
  double f = 1.0;
  for (int t = 2; t <= ei.nu; ++t) f *= t;
  for (int t = 2; t <= ej.nu; ++t) f *= t;
  const double sgn = ei.nu % 2 == 0 ? 1.0 : -1.0;
  return sgn / f *
         exp_moment(ei.nu + ej.nu, ej.lambda - std::conj(ei.lambda), h);
}

GramDiag eig_report(Eigen::MatrixXcd G) {
  G = Cplx(0.5) * (G + G.adjoint().eval());
  const int n = int(G.rows());
  Eigen::VectorXd d = G.diagonal().real();
  const double dmax = d.maxCoeff();
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i)
    s(i) = 1.0 / std::sqrt(std::max(d(i), 1e-30 * dmax));
  Eigen::MatrixXcd Gn = s.asDiagonal() * G * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Gn);
  GramDiag out;
  out.self_min = std::max(es.eigenvalues()(0), 0.0);
  out.cond = es.eigenvalues()(n - 1) / std::max(es.eigenvalues()(0), 1e-300);
  out.sigma_min = out.self_min;
  return out;
}

}  // namespace

GramDiag gram_diagnostic(const Subspectrum& sub, double halfwidth, int T) {
  if (!(halfwidth > 0.0)) throw SchemaError("gram_diagnostic: bad halfwidth");
  if (T < 1) throw SchemaError("gram_diagnostic: bad section size");

  std::vector<Entry> entries;
  for (std::size_t i = 0; i < sub.values.size(); ++i) {
    const Cplx lam = sub.values[i];
    if (std::abs(lam.real()) > double(T)) continue;
    // Adjacent repeats raise the derivative order (multiplicity convention).
    if (!entries.empty() && entries.back().lambda == lam)
      entries.push_back({lam, entries.back().nu + 1});
    else
      entries.push_back({lam, 0});
  }
  if (entries.empty())
    throw SchemaError("gram_diagnostic: no values inside the section");

  const int R = int(entries.size());
  Eigen::MatrixXcd G(R, R);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < R; ++j)
      G(i, j) = pair_inner(entries[i], entries[j], halfwidth);
  GramDiag out = eig_report(G);

  // Completeness proxy: project the normalized family onto the orthonormal
  // critical-density reference e^{i m (pi/h) t} and take the smallest
  // eigenvalue of the resulting frame-operator section. A family that spans
  // the window section gives ~1; missing density leaves near-null reference
  // directions. The m = 0 direction is excluded: the moment system always
  // carries its own zero-frequency pin, so admissible data families skip it
  // and would otherwise score 0 unconditionally.
  const double step = kPi / halfwidth;
  const int M = int(std::floor(double(T) / step));
  if (M < 1) {  // no reference directions inside the section
    out.sigma_min = 0.0;
    return out;
  }
  const int cols = 2 * M;
  Eigen::MatrixXcd Cmat(cols, R);
  for (int k = 0; k < R; ++k) {
    const Entry& e = entries[k];
    double f = 1.0;
    for (int t = 2; t <= e.nu; ++t) f *= t;
    const double nrm = std::sqrt(std::max(
        std::real(pair_inner(e, e, halfwidth)), 1e-300));
    for (int m = -M; m <= M; ++m) {
      if (m == 0) continue;
      Cplx ip = exp_moment(e.nu, e.lambda - double(m) * step, halfwidth) / f;
      Cmat(m < 0 ? m + M : m + M - 1, k) = ip / (std::sqrt(2.0 * halfwidth) * nrm);
    }
  }
  Eigen::MatrixXcd F = Cmat * Cmat.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> fs(
      Cplx(0.5) * (F + F.adjoint().eval()));
  out.sigma_min = std::max(fs.eigenvalues()(0), 0.0);
  return out;
}

GramDiag row_gram(const std::vector<HVector>& rows) {
  if (rows.empty()) throw SchemaError("row_gram: no rows");
  const int R = int(rows.size());
  Eigen::MatrixXcd G(R, R);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < R; ++j) G(i, j) = hv_inner(rows[i], rows[j]);
  return eig_report(G);
}

ConditionReport run_checks(const Subspectrum& sub, const ExprPtr& f1,
                           const ExprPtr& f2, double halfwidth, int T) {
  ConditionReport rep;
  rep.s = check_S(sub, f1, f2);
  rep.a = check_A(sub);
  rep.gram = gram_diagnostic(sub, halfwidth, T);
  return rep;
}

}  // namespace pencilspec
