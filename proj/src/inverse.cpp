#include "pencilspec/inverse.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "pencilspec/expmoment.hpp"

namespace pencilspec {

Cplx hv_inner(const HVector& g, const HVector& h) {
  if (g.first.size() != g.second.size() || h.first.size() != h.second.size() ||
      g.first.size() != h.first.size() || g.first.empty())
    throw SchemaError("hv_inner: sample count mismatch");
  Cplx acc = 0.0;
  for (std::size_t i = 0; i < g.first.size(); ++i)
    acc += std::conj(g.first[i]) * h.first[i] +
           std::conj(g.second[i]) * h.second[i];
  // Samples are transform values at integer frequencies; Parseval on (-pi,pi)
  // puts the basis norm 2*pi in the denominator.
  return acc / (2.0 * kPi);
}

namespace {

struct Cluster {
  Cplx value;
  int mult;
};

// Groups an adjacency-ordered list into (value, multiplicity) clusters and
// rejects lists where equal values are separated.
std::vector<Cluster> cluster_exact(const CVec& values) {
  std::vector<Cluster> out;
  for (const Cplx& v : values) {
    if (!out.empty() && v == out.back().value) {
      ++out.back().mult;
      continue;
    }
    for (const Cluster& c : out)
      if (c.value == v)
        throw SchemaError("subspectrum: equal values must be adjacent");
    out.push_back({v, 1});
  }
  return out;
}

}  // namespace

MomentSystem build_moment_system(const Subspectrum& sub, const ExprPtr& f1,
                                 const ExprPtr& f2, int T) {
  if (T < 4) throw SchemaError("build_moment_system: T must be at least 4");
  if (!f1 || !f2) throw SchemaError("build_moment_system: null boundary function");

  // rows stay clear of the tail-model poles at |lambda| = T+1, T+2, ...
  CVec kept;
  for (const Cplx& v : sub.values)
    if (std::abs(v) <= double(T) + 0.5) kept.push_back(v);
  std::vector<Cluster> clusters = cluster_exact(kept);

  MomentSystem ms;
  ms.T = T;
  ms.omega0_mod1 = sub.omega0_mod1;
  const int width = 2 * T + 1;
  const Cplx w0 = sub.omega0_mod1;

  // w(lambda) = -[lambda f1 cos(pi(lambda - w0)) + f2 sin(pi(lambda - w0))]
  ExprPtr lam = ex_poly({0.0, 1.0});
  ExprPtr w_expr = ex_neg(ex_sum(
      {ex_product({lam, f1, ex_cos(kPi, -kPi * w0)}),
       ex_product({f2, ex_sin(kPi, -kPi * w0)})}));
  ExprPtr A_expr = ex_product({lam, f1});

  auto push_row = [&](Cplx lambda, int nu) {
    // Derivatives of A = lambda*f1 and B = f2 at the point.
    CVec As(nu + 1), Bs(nu + 1);
    for (int i = 0; i <= nu; ++i) {
      As[i] = deriv(A_expr, lambda, i);
      Bs[i] = deriv(f2, lambda, i);
    }
    HVector row;
    row.first.assign(width, 0.0);
    row.second.assign(width, 0.0);
    for (int m = -T; m <= T; ++m) {
      Cplx a = 0.0, b = 0.0;
      double binom = 1.0;  // Leibniz weights for the product derivative
      for (int j = 0; j <= nu; ++j) {
        if (j > 0) binom *= double(nu - j + 1) / double(j);
        const Cplx e = binom * exp_moment(j, lambda + double(m), kPi);
        a += As[nu - j] * e;
        b += Bs[nu - j] * e;
      }
      row.first[m + T] = a;
      row.second[m + T] = b;
    }
    // Same Leibniz rule for the dropped-tail coefficients; tail_R stops at
    // the second derivative, so deeper rows leave the model out entirely.
    Cplx tf = 0.0, ts = 0.0;
    if (nu <= 2) {
      double binom = 1.0;
      for (int j = 0; j <= nu; ++j) {
        if (j > 0) binom *= double(nu - j + 1) / double(j);
        const Cplx r = binom * tail_R(T, lambda, j);
        tf += As[nu - j] * r;
        ts += Bs[nu - j] * r;
      }
    }
    ms.rows.push_back(std::move(row));
    ms.rhs.push_back(deriv(w_expr, lambda, nu));
    ms.row_lambda.push_back(lambda);
    ms.row_nu.push_back(nu);
    ms.tail_first.push_back(tf);
    ms.tail_second.push_back(ts);
  };

  // The analytic limit of lambda*S at the origin pins the zero-frequency
  // sample of the second component: (u, v0) = sin(pi w0) with v0 = (0, 1).
  {
    HVector v0;
    v0.first.assign(width, 0.0);
    v0.second.assign(width, 0.0);
    v0.second[T] = 2.0 * kPi;  // transform of the constant 1 at frequency 0
    ms.rows.push_back(std::move(v0));
    ms.rhs.push_back(std::sin(kPi * w0));
    ms.row_lambda.push_back(0.0);
    ms.row_nu.push_back(0);
    // the pin addresses the n = 0 sample directly; the cardinal series is
    // interpolatory there and no tail enters
    ms.tail_first.push_back(0.0);
    ms.tail_second.push_back(0.0);
  }

  for (const Cluster& c : clusters) {
    if (c.value == Cplx(0.0)) {
      // The order-zero condition at the origin is a multiple of the pinned
      // row above, so a zero eigenvalue starts contributing at order one.
      for (int nu = 1; nu <= c.mult; ++nu) push_row(c.value, nu);
    } else {
      for (int nu = 0; nu < c.mult; ++nu) push_row(c.value, nu);
    }
  }
  return ms;
}

SolveResult solve_u(const MomentSystem& ms, double ridge_scale,
                    double completeness_tol) {
  const int R = int(ms.rows.size());
  const int width = 2 * ms.T + 1;
  const int C = 2 * width + 2;  // samples plus the two tail amplitudes
  if (R == 0) throw SchemaError("solve_u: empty system");
  const bool has_tail = int(ms.tail_first.size()) == R &&
                        int(ms.tail_second.size()) == R;

  // Conjugated equations make the conditions linear in the sample vector:
  // sum_c conj(v_k[c]) u[c] / (2 pi) + tail terms = conj(w_k).
  Eigen::MatrixXcd A(R, C);
  Eigen::VectorXcd b(R);
  for (int k = 0; k < R; ++k) {
    const HVector& row = ms.rows[k];
    if (int(row.first.size()) != width || int(row.second.size()) != width)
      throw SchemaError("solve_u: row width mismatch");
    for (int c = 0; c < width; ++c) {
      A(k, c) = std::conj(row.first[c]) / (2.0 * kPi);
      A(k, width + c) = std::conj(row.second[c]) / (2.0 * kPi);
    }
    A(k, 2 * width) = has_tail ? std::conj(ms.tail_first[k]) : 0.0;
    A(k, 2 * width + 1) = has_tail ? std::conj(ms.tail_second[k]) : 0.0;
    b(k) = std::conj(ms.rhs[k]);
  }

  // The tail columns stay at their natural scale. Near-integer data barely
  // sees them (R vanishes on the lattice) and they degenerate into the span
  // of the sample columns; any rescaling would rotate that null direction
  // into the samples and bias them. Off-lattice data sees them at O(1) and
  // uses them to absorb the truncation mismatch.

  SolveResult out;

  // Row Gram, normalized to unit diagonal: conditioning of the data rows
  // themselves (the sample part; tail columns are bookkeeping).
  Eigen::MatrixXcd G = A.leftCols(2 * width) * A.leftCols(2 * width).adjoint();
  Eigen::VectorXd d = G.diagonal().real();
  const double dmax = d.maxCoeff();
  if (!(dmax > 0.0))
    throw NumericalError("solve_u", "all data rows vanish");
  Eigen::VectorXd scale(R);
  for (int k = 0; k < R; ++k)
    scale(k) = 1.0 / std::sqrt(std::max(d(k), 1e-30 * dmax));
  Eigen::MatrixXcd Gn = scale.asDiagonal() * G * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ges(Gn);
  {
    const auto& ev = ges.eigenvalues();
    out.row_gram_min = std::max(ev(0), 0.0);
    out.row_gram_cond = ev(R - 1) / std::max(ev(0), 1e-300);
  }

  Eigen::MatrixXcd Nmat = A.adjoint() * A;
  Eigen::VectorXcd rhs = A.adjoint() * b;

  // Rank check restricted to the columns the data can actually determine:
  // structurally silent blocks (for instance the first component under a
  // boundary with f1 = 0) are excluded so they do not mask a genuine
  // deficiency, and so are the frequencies beyond the span of the supplied
  // rows, which are resolved only by ridge decay. Each near-integer row
  // chiefly excites the opposite frequency, so the window follows the
  // largest row abscissa, one column short for safety.
  double lammax = 0.0;
  for (std::size_t k = 1; k < ms.row_lambda.size(); ++k)
    lammax = std::max(lammax, std::abs(ms.row_lambda[k].real()));
  const int mwin = std::min(ms.T, std::max(1, int(std::lround(lammax)) - 1));
  Eigen::VectorXd cd = Nmat.diagonal().real();
  const double cdmax = cd.maxCoeff();
  std::vector<int> active;
  for (int comp = 0; comp < 2; ++comp) {
    // a whole component can be structurally silent (f1 = 0 never touches the
    // first block); individual columns must not be filtered by their own
    // diagonal, or deleted frequencies would mask the rank deficiency they
    // cause
    double blockmax = 0.0;
    for (int m = -mwin; m <= mwin; ++m)
      blockmax = std::max(blockmax, cd(comp * width + m + ms.T));
    if (blockmax <= 1e-12 * cdmax) continue;
    for (int m = -mwin; m <= mwin; ++m)
      active.push_back(comp * width + m + ms.T);
  }
  if (active.empty()) throw NumericalError("solve_u", "no determinable columns");
  {
    const int Ca = int(active.size());
    Eigen::MatrixXcd Na(Ca, Ca);
    for (int i = 0; i < Ca; ++i)
      for (int j = 0; j < Ca; ++j) Na(i, j) = Nmat(active[i], active[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> nes(Na);
    const auto& ev = nes.eigenvalues();
    out.active_min_rel = std::max(ev(0), 0.0) / std::max(ev(Ca - 1), 1e-300);
    out.complete = out.active_min_rel > completeness_tol;
  }

  out.ridge = ridge_scale * Nmat.diagonal().real().maxCoeff();
  Eigen::MatrixXcd H = Nmat;
  H.diagonal().array() += out.ridge;
  Eigen::VectorXcd u = H.ldlt().solve(rhs);

  out.u.first.assign(width, 0.0);
  out.u.second.assign(width, 0.0);
  for (int c = 0; c < width; ++c) {
    out.u.first[c] = u(c);
    out.u.second[c] = u(width + c);
  }
  return out;
}

BoundaryTriple reconstruct_triple(const HVector& u, Cplx omega0) {
  if (u.first.size() != u.second.size() || u.first.empty() ||
      u.first.size() % 2 == 0)
    throw SchemaError("reconstruct_triple: bad sample vector");
  const int width = int(u.first.size());
  BoundaryTriple bt;
  bt.omega0 = omega0;
  bt.K.assign(width, 0.0);
  bt.N.assign(width, 0.0);
  // u holds the conjugated kernels, so samples flip frequency and conjugate.
  for (int c = 0; c < width; ++c) {
    bt.K[c] = std::conj(u.second[width - 1 - c]);
    bt.N[c] = std::conj(u.first[width - 1 - c]);
  }
  return bt;
}

namespace {

// Phase-tracking winding number of g around a circle; radius must already
// isolate the zero cluster from everything else.
int winding_g(const BoundaryTriple& bt, Cplx center, double r, int q = 96) {
  double argsum = 0.0;
  Cplx prev = eval_g(bt, center + r);
  for (int i = 1; i <= q; ++i) {
    double phi = 2.0 * kPi * i / q;
    Cplx cur = eval_g(bt, center + r * Cplx(std::cos(phi), std::sin(phi)));
    if (std::abs(cur) == 0.0 || std::abs(prev) == 0.0)
      throw NumericalError("locate_thetas", "zero on verification circle");
    argsum += std::arg(cur / prev);
    prev = cur;
  }
  return int(std::lround(argsum / (2.0 * kPi)));
}

}  // namespace

CVec locate_thetas(const BoundaryTriple& bt, int count) {
  bt.validate();
  if (count < 1) throw SchemaError("locate_thetas: count must be positive");

  CVec found;
  for (int k = -count; k <= count; ++k) {
    if (k == 0) continue;
    const Cplx seed = double(k) + bt.omega0;
    Cplx z = seed;
    bool ok = false;
    for (int it = 0; it < 80; ++it) {
      Cplx g = eval_g(bt, z, 0);
      Cplx gp = eval_g(bt, z, 1);
      if (std::abs(gp) < 1e-300) break;
      Cplx step = g / gp;
      z -= step;
      if (std::abs(z - seed) > 2.5) break;  // left the basin entirely
      if (std::abs(step) < 1e-12 * (1.0 + std::abs(z))) {
        ok = true;
        break;
      }
    }
    if (!ok)
      throw NumericalError("locate_thetas", "Newton stalled near the seed " +
                                                std::to_string(k));
    found.push_back(z);
  }

  // lambda*S has an artificial simple zero at the origin whenever S itself
  // does not vanish there; it carries no spectral content.
  CVec keep;
  for (const Cplx& z : found) {
    if (std::abs(z) < 1e-7 && std::abs(eval_g(bt, 0.0, 1)) > 1e-9) continue;
    keep.push_back(z);
  }

  std::sort(keep.begin(), keep.end(), [](const Cplx& a, const Cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  // Merge Newton limits that coincide; a merged cluster must be a genuinely
  // multiple zero, otherwise two seeds fell into one basin and a zero was
  // skipped.
  CVec out;
  std::size_t i = 0;
  while (i < keep.size()) {
    std::size_t j = i + 1;
    while (j < keep.size() && std::abs(keep[j] - keep[i]) <
                                  1e-7 * (1.0 + std::abs(keep[i])))
      ++j;
    const int m = int(j - i);
    if (m > 1) {
      double rsep = 0.45;
      if (i > 0) rsep = std::min(rsep, 0.4 * std::abs(keep[i] - keep[i - 1]));
      if (j < keep.size())
        rsep = std::min(rsep, 0.4 * std::abs(keep[j] - keep[i]));
      if (winding_g(bt, keep[i], std::max(rsep, 1e-6)) != m)
        throw NumericalError("locate_thetas",
                             "two seeds converged to one simple zero");
    }
    for (int t = 0; t < m; ++t) out.push_back(keep[i]);
    i = j;
  }
  return out;
}

WeylData weyl_residues(const BoundaryTriple& bt, const CVec& thetas) {
  bt.validate();
  if (thetas.empty()) throw SchemaError("weyl_residues: empty theta list");

  CVec sorted = thetas;
  std::sort(sorted.begin(), sorted.end(), [](const Cplx& a, const Cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  std::vector<Cluster> clusters;
  for (const Cplx& v : sorted) {
    if (!clusters.empty() &&
        std::abs(v - clusters.back().value) < 1e-7 * (1.0 + std::abs(v)))
      ++clusters.back().mult;
    else
      clusters.push_back({v, 1});
  }

  WeylData wd;
  wd.omega0 = bt.omega0;
  wd.thetas = sorted;
  for (std::size_t n = 0; n < clusters.size(); ++n) {
    const Cplx th = clusters[n].value;
    const int m = clusters[n].mult;
    const Cplx S1 = eval_S1(bt, th);
    if (std::abs(S1) < 1e-12)
      throw NumericalError("weyl_residues",
                           "S^[1] vanishes at a theta; values undefined");
    if (m == 1) {
      const Cplx Sd = eval_S_deriv(bt, th);
      if (std::abs(Sd) < 1e-12)
        throw NumericalError("weyl_residues", "theta is not a simple zero");
      wd.rows.push_back({th, 0, 1.0 / (S1 * Sd)});
      continue;
    }
    // Multiple zero: the values are residues of (z-th)^nu / S at th.
    double r = 0.45;
    if (n > 0) r = std::min(r, 0.5 * std::abs(th - clusters[n - 1].value));
    if (n + 1 < clusters.size())
      r = std::min(r, 0.5 * std::abs(clusters[n + 1].value - th));
    const int Q = 64;
    for (int nu = 0; nu < m; ++nu) {
      Cplx acc = 0.0;
      for (int qindex = 0; qindex < Q; ++qindex) {
        double phi = 2.0 * kPi * qindex / Q;
        Cplx e{std::cos(phi), std::sin(phi)};
        Cplx z = th + r * e;
        Cplx S = eval_S(bt, z);
        if (std::abs(S) < 1e-300)
          throw NumericalError("weyl_residues", "contour hit a zero of S");
        acc += e * std::pow(r * e, nu) / S;
      }
      wd.rows.push_back({th, nu, acc * r / double(Q) / S1});
    }
  }
  return wd;
}

BoundaryTriple parity_fix(const BoundaryTriple& bt, Cplx omega0_true) {
  bt.validate();
  const Cplx d = omega0_true - bt.omega0;
  const long m = std::lround(d.real());
  if (std::abs(d.real() - double(m)) > 1e-6 || std::abs(d.imag()) > 1e-6)
    throw SchemaError("parity_fix: means do not differ by an integer");
  BoundaryTriple out = bt;
  out.omega0 = omega0_true;
  if (m % 2 != 0) {
    // sin(pi(l - w0 - m)) = (-1)^m sin(pi(l - w0)): odd shifts flip the
    // free part, so the kernels flip with it.
    for (Cplx& v : out.K) v = -v;
    for (Cplx& v : out.N) v = -v;
  }
  return out;
}

Cplx sigma_shift(const BoundaryTriple& bt, const CoefficientPair& candidate,
                 const CVec& probes, double spread_tol, double* spread_out,
                 const ForwardOpts& opts) {
  bt.validate();
  candidate.validate();
  if (std::abs((candidate.b - candidate.a) - kPi) > 1e-9)
    throw SchemaError("sigma_shift: candidate interval length must be pi");

  CVec pts = probes;
  if (pts.empty()) {
    // Integer arguments are sample-exact for the triple (the cardinal series
    // interpolates on its own lattice), so prefer them and fall back to
    // half-integer offsets from the omega0 lattice, which stay away from the
    // zeros of S, when S itself nearly vanishes on the integers.
    for (int m = 1; int(pts.size()) < 10 && m <= bt.half() - 2; ++m)
      for (int sgn : {1, -1}) {
        const Cplx z = double(sgn * m);
        if (int(pts.size()) < 10 && std::abs(eval_S(bt, z)) > 1e-4)
          pts.push_back(z);
      }
    if (pts.size() < 4) {
      pts.clear();
      for (int j = 0; j < 10; ++j) pts.push_back(bt.omega0 + double(j) + 0.5);
    }
  }
  CVec hs;
  for (const Cplx& lambda : pts) {
    const Cplx S = eval_S(bt, lambda);
    if (std::abs(S) <= 1e-6)
      throw NumericalError("sigma_shift", "probe too close to a zero of S");
    const Cplx S1 = eval_S1(bt, lambda);
    ForwardResult fr = boundary_S(candidate, lambda, opts);
    hs.push_back((fr.y1 - S1) / S);
  }
  if (hs.size() < 3)
    throw NumericalError("sigma_shift", "too few usable probe points");
  Cplx mean = 0.0;
  for (const Cplx& h : hs) mean += h;
  mean /= double(hs.size());
  double spread = 0.0;
  for (const Cplx& h : hs) spread = std::max(spread, std::abs(h - mean));
  if (spread_out) *spread_out = spread;
  if (spread > spread_tol)
    throw NumericalError("sigma_shift",
                         "probe values disagree; candidate does not match");
  return mean;
}

}  // namespace pencilspec
