#include <algorithm>
#include <cmath>
#include <functional>

#include "pencilspec/forward.hpp"

namespace pencilspec {

namespace {

struct DeltaFn {
  const CoefficientPair& cp;
  const ExprPtr& f1;
  const ExprPtr& f2;
  const ForwardOpts& fwd;
  mutable long evals = 0;

  std::pair<Cplx, Cplx> operator()(Cplx z) const {
    ++evals;
    return char_fn_d(cp, f1, f2, z, fwd);
  }
};

struct ContourZero {};  // a zero (numerically) sits on the contour

// winding number over the closed polyline by phase tracking. A segment is
// accepted only when the sampled phase rate |Delta'/Delta| bounds the whole
// segment's phase change below pi/2 and the endpoint increment equals the sum
// of its two half-increments. The rate bound matters: increments are measured
// mod 2pi, and for phase-linear Delta (the free problem) half-edges can alias
// by exactly 2pi in a way the doubling test alone cannot see.
int winding(const DeltaFn& F, const std::vector<Cplx>& corners, int max_depth) {
  double argsum = 0.0;
  std::function<void(Cplx, Cplx, std::pair<Cplx, Cplx>, std::pair<Cplx, Cplx>, int)>
      seg = [&](Cplx za, Cplx zb, std::pair<Cplx, Cplx> fa,
                std::pair<Cplx, Cplx> fb, int depth) {
        double sa = std::abs(fa.first), sb = std::abs(fb.first);
        double scale = std::max(sa, sb);
        if (scale == 0.0 || std::min(sa, sb) < 1e-13 * scale)
          throw ContourZero{};
        Cplx zm = (za + zb) / 2.0;
        auto fm = F(zm);
        if (std::abs(fm.first) < 1e-13 * scale) throw ContourZero{};
        double rate = std::max({std::abs(fa.second / fa.first),
                                std::abs(fm.second / fm.first),
                                std::abs(fb.second / fb.first)});
        double d1 = std::arg(fm.first / fa.first);
        double d2 = std::arg(fb.first / fm.first);
        double d = std::arg(fb.first / fa.first);
        if (rate * std::abs(zb - za) > kPi / 2 || std::abs(d1) > kPi / 2 ||
            std::abs(d2) > kPi / 2 || std::abs(d1 + d2 - d) > 1e-9) {
          if (depth >= max_depth)
            throw NumericalError("eigenvalues",
                                 "winding did not stabilize on a contour edge");
          seg(za, zm, fa, fm, depth + 1);
          seg(zm, zb, fm, fb, depth + 1);
          return;
        }
        argsum += d1 + d2;
      };

  std::vector<std::pair<Cplx, Cplx>> fv(corners.size());
  for (std::size_t i = 0; i < corners.size(); ++i) fv[i] = F(corners[i]);
  for (std::size_t i = 0; i < corners.size(); ++i) {
    std::size_t j = (i + 1) % corners.size();
    seg(corners[i], corners[j], fv[i], fv[j], 0);
  }
  double w_arg = argsum / (2.0 * kPi);
  long w = std::lround(w_arg);
  if (std::abs(w_arg - double(w)) > 1e-6)
    throw NumericalError("eigenvalues", "winding sum is not an integer");
  return int(w);
}

std::vector<Cplx> box_corners(const SearchBox& b) {
  return {Cplx(b.re0, b.im0), Cplx(b.re1, b.im0), Cplx(b.re1, b.im1),
          Cplx(b.re0, b.im1)};
}

int winding_box(const DeltaFn& F, SearchBox b, const EigOpts& opts) {
  double dre = b.re1 - b.re0, dim = b.im1 - b.im0;
  for (int j = 0; j <= opts.max_jitter; ++j) {
    try {
      return winding(F, box_corners(b), opts.max_depth);
    } catch (ContourZero&) {
      // nudge the rectangle so the offending zero moves inside or outside
      double e = 3e-4 * double(j + 1);
      b.re0 -= e * dre;
      b.re1 += 0.7 * e * dre;
      b.im0 -= e * std::max(dim, 0.1);
      b.im1 += 0.7 * e * std::max(dim, 0.1);
    }
  }
  throw NumericalError("eigenvalues", "zero on contour after max jitter");
}

int winding_circle(const DeltaFn& F, Cplx c, double r, const EigOpts& opts) {
  for (int j = 0; j <= opts.max_jitter; ++j) {
    try {
      std::vector<Cplx> pts;
      for (int k = 0; k < 16; ++k)
        pts.push_back(c + r * std::polar(1.0, 2.0 * kPi * k / 16.0));
      return winding(F, pts, opts.max_depth);
    } catch (ContourZero&) {
      r *= 1.37;
    }
  }
  throw NumericalError("eigenvalues", "zero on verification circle");
}

bool newton(const DeltaFn& F, Cplx seed, Cplx& root, int mult = 1) {
  Cplx z = seed;
  double last = 1e300;
  int good = 0;
  // An m-fold zero caps the attainable accuracy near eps^(1/m); demanding
  // more would spin on evaluation noise.
  const double tol = mult > 1 ? 1e-7 : 1e-11;
  for (int it = 0; it < 60; ++it) {
    Cplx v, d;
    try {
      std::tie(v, d) = F(z);
    } catch (const NumericalError&) {
      return false;  // stepped somewhere the solver cannot evaluate
    }
    if (d == 0.0) return false;
    Cplx step = double(mult) * v / d;  // exact for an isolated m-fold zero
    double s = std::abs(step);
    // seeds sit within a subdivision box of the target; a jump past this is
    // a lost basin, not a root (a near-critical seed can explode the first
    // step before the divergence test below has any history)
    if (s > 3.0) return false;
    z -= step;
    if (s < tol * (1.0 + std::abs(z))) {
      if (++good >= 2) {
        root = z;
        return true;
      }
    } else {
      good = 0;
    }
    if (s > 4.0 * last && s > 1.0) return false;  // diverging
    last = s;
  }
  if (good >= 1) {
    root = z;
    return true;
  }
  return false;
}

struct Collector {
  std::vector<std::pair<Cplx, int>> roots;  // value, multiplicity

  void add(Cplx z, int m, double tol) {
    for (auto& [v, mm] : roots)
      if (std::abs(v - z) < tol) {
        // same cluster found twice through different boxes
        return;
      }
    roots.emplace_back(z, m);
  }
};

bool inside(const SearchBox& b, Cplx z, double slack) {
  return z.real() >= b.re0 - slack && z.real() <= b.re1 + slack &&
         z.imag() >= b.im0 - slack && z.imag() <= b.im1 + slack;
}

void subdivide_collect(const DeltaFn& F, const SearchBox& box,
                       const EigOpts& opts, Collector& out, int depth) {
  int w = winding_box(F, box, opts);
  if (w == 0) return;
  double dre = box.re1 - box.re0, dim = box.im1 - box.im0;
  double diag = std::hypot(dre, dim);

  if (w >= 1) {
    Cplx center((box.re0 + box.re1) / 2, (box.im0 + box.im1) / 2);
    Cplx root;
    if (newton(F, center, root, w) && inside(box, root, 0.05 * diag)) {
      double r = std::max(w > 1 ? 1e-5 : opts.cluster_tol,
                          std::min(1e-4, 0.05 * diag));
      int m = winding_circle(F, root, r, opts);
      if (m == w) {
        out.add(root, m, opts.cluster_tol);
        return;
      }
    }
    if (diag < std::max(opts.cluster_tol, 1e-9)) {
      out.add(center, w, opts.cluster_tol);  // unresolvable cluster
      return;
    }
  }
  if (depth >= opts.max_depth)
    throw NumericalError("eigenvalues", "subdivision depth exhausted");

  SearchBox b1 = box, b2 = box;
  if (dre >= dim) {
    double mid = box.re0 + dre * 0.5000731;  // irrational-ish split point
    b1.re1 = mid;
    b2.re0 = mid;
  } else {
    double mid = box.im0 + dim * 0.5000731;
    b1.im1 = mid;
    b2.im0 = mid;
  }
  subdivide_collect(F, b1, opts, out, depth + 1);
  subdivide_collect(F, b2, opts, out, depth + 1);
}

}  // namespace

CVec eigenvalues(const CoefficientPair& cp, const ExprPtr& f1,
                 const ExprPtr& f2, const SearchBox& box, const EigOpts& opts) {
  DeltaFn F{cp, f1, f2, opts.fwd};
  int total = winding_box(F, box, opts);
  Collector col;

  bool done = false;
  if (!opts.hints.empty()) {
    for (Cplx seed : opts.hints) {
      Cplx root;
      if (!newton(F, seed, root)) continue;
      if (!inside(box, root, 0.0)) continue;
      bool dup = false;
      for (auto& [v, m] : col.roots)
        if (std::abs(v - root) < opts.cluster_tol) dup = true;
      if (dup) continue;
      int m = winding_circle(
          F, root, std::max(opts.cluster_tol, 1e-6), opts);
      if (m >= 1) col.add(root, m, opts.cluster_tol);
    }
    int found = 0;
    for (auto& [v, m] : col.roots) {
      (void)v;
      found += m;
    }
    done = (found == total);
    if (!done) col.roots.clear();  // hints incomplete; fall back
  }
  if (!done) subdivide_collect(F, box, opts, col, 0);

  int found = 0;
  for (auto& [v, m] : col.roots) {
    (void)v;
    found += m;
  }
  if (found != total)
    throw NumericalError("eigenvalues", "root count disagrees with winding");

  std::sort(col.roots.begin(), col.roots.end(),
            [](const auto& x, const auto& y) {
              if (x.first.real() != y.first.real())
                return x.first.real() < y.first.real();
              return x.first.imag() < y.first.imag();
            });
  CVec vals;
  for (auto& [v, m] : col.roots)
    for (int i = 0; i < m; ++i) vals.push_back(v);
  return vals;
}

Cplx refine_eigenvalue(const CoefficientPair& cp, const ExprPtr& f1,
                       const ExprPtr& f2, Cplx z0, const ForwardOpts& opts) {
  Cplx z = z0;
  for (int it = 0; it < 8; ++it) {
    auto [v, d] = char_fn_d(cp, f1, f2, z, opts);
    if (d == 0.0) return z0;
    Cplx step = v / d;
    if (std::abs(step) > 0.2 * (1.0 + std::abs(z))) return z0;
    z -= step;
    if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) break;
  }
  return z;
}

}  // namespace pencilspec
