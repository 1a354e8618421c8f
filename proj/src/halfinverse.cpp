#include "pencilspec/halfinverse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <string>

#include "pencilspec/conditions.hpp"

namespace pencilspec {

void HalfProblem::validate() const {
  known_half.validate();
  if (std::abs(known_half.a - kPi) > 1e-9 ||
      std::abs(known_half.b - 2.0 * kPi) > 1e-9)
    throw SchemaError("half: known coefficients must live on (pi, 2pi)");
  if (spectrum.size() < 16)
    throw SchemaError("half: need at least 16 spectrum entries");
  for (std::size_t i = 1; i < spectrum.size(); ++i)
    if (spectrum[i].real() < spectrum[i - 1].real() &&
        spectrum[i] != spectrum[i - 1])
      throw SchemaError("half: spectrum not sorted by real part");
}

std::pair<Cplx, Cplx> phi_at_midpoint(const CoefficientPair& known_half,
                                      Cplx lambda, const ForwardOpts& opts) {
  ForwardResult fr = integrate(known_half, lambda, {0.0, 1.0}, true, opts);
  return {fr.y, fr.y1};
}

std::pair<ExprPtr, ExprPtr> midpoint_matching_exprs(
    const CoefficientPair& known_half, const ForwardOpts& opts) {
  known_half.validate();
  static std::atomic<int> counter{0};
  const int id = counter.fetch_add(1);
  const std::string tag_phi = "phi#" + std::to_string(id);
  const std::string tag_phi1 = "phi1#" + std::to_string(id);
  CoefficientPair cp = known_half;  // owned copies inside the closures
  ForwardOpts fo = opts;
  register_solver(tag_phi, [cp, fo](Cplx lambda) {
    return phi_at_midpoint(cp, lambda, fo).first;
  });
  register_solver(tag_phi1, [cp, fo](Cplx lambda) {
    return phi_at_midpoint(cp, lambda, fo).second;
  });
  return {ex_neg(ex_solver(tag_phi)), ex_solver(tag_phi1)};
}

Cplx estimate_omega0_mod1(const CVec& spectrum, Cplx known_mean,
                          double* spread_out) {
  if (spectrum.size() < 16)
    throw SchemaError("estimate_omega0: need at least 16 entries");
  CVec vals = spectrum;
  std::sort(vals.begin(), vals.end(), [](const Cplx& a, const Cplx& b) {
    return a.real() < b.real();
  });
  std::vector<int> idx = enumerate_skip_zero(vals, 0.5);

  // Offsets mu_k - k/2; symmetric pairs first, so the odd-in-k part of the
  // second-order asymptotics cancels instead of biasing the tail mean.
  std::map<int, Cplx> off;
  for (std::size_t j = 0; j < vals.size(); ++j)
    off[idx[j]] = vals[j] - 0.5 * idx[j];
  int kmax = 0;
  for (const auto& [k, v] : off) kmax = std::max(kmax, std::abs(k));
  const int ktail = std::max(3, kmax / 2);
  CVec tail;
  for (int k = ktail; k <= kmax; ++k) {
    const bool hp = off.count(k) > 0, hm = off.count(-k) > 0;
    if (hp && hm)
      tail.push_back(0.5 * (off[k] + off[-k]));
    else if (hp)
      tail.push_back(off[k]);
    else if (hm)
      tail.push_back(off[-k]);
  }
  if (tail.size() < 4)
    throw NumericalError("estimate_omega0", "tail too short for a stable fit");

  // Median of block averages over the tail.
  const int nblocks = std::min<int>(5, int(tail.size()) / 2);
  CVec means;
  for (int bidx = 0; bidx < nblocks; ++bidx) {
    const std::size_t lo = tail.size() * bidx / nblocks;
    const std::size_t hi = tail.size() * (bidx + 1) / nblocks;
    Cplx acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += tail[i];
    means.push_back(acc / double(hi - lo));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  std::vector<double> re, im;
  for (const Cplx& m : means) re.push_back(m.real()), im.push_back(m.imag());
  const Cplx c{median(re), median(im)};

  double spread = 0.0;
  for (const Cplx& m : means) spread = std::max(spread, std::abs(m - c));
  if (spread_out) *spread_out = spread;
  if (spread > 0.1)
    throw NumericalError("estimate_omega0",
                         "tail averages disagree; enumeration unstable");

  Cplx w0 = 2.0 * c - known_mean;
  return w0 - std::floor(w0.real());
}

HalfResult solve_half(const HalfProblem& hp, const RecoveryConfig& cfg,
                      int T, const ForwardOpts& opts) {
  hp.validate();
  auto [f1, f2] = midpoint_matching_exprs(hp.known_half, opts);

  HalfResult out;
  out.omega0_mod1 =
      estimate_omega0_mod1(hp.spectrum, hp.known_mean, &out.tail_spread);

  Subspectrum sub{hp.spectrum, out.omega0_mod1};
  SCheck sc = check_S(sub, f1, f2);
  if (!sc.ok)
    throw ConditionError("boundary functions vanish together on the data");
  ACheck ac = check_A(sub);
  if (!ac.ok) throw ConditionError("imaginary parts exceed the (A) bound");

  MomentSystem ms = build_moment_system(sub, f1, f2, T);
  SolveResult sr = solve_u(ms);
  if (!sr.complete)
    throw ConditionError("moment system rank-deficient; data incomplete");
  BoundaryTriple bt = reconstruct_triple(sr.u, out.omega0_mod1);

  const int count =
      std::max(2 * cfg.basis_dim, std::min(20, T / 3));
  CVec thetas = locate_thetas(bt, count);
  WeylData wd = weyl_residues(bt, thetas);

  RecoveryConfig rcfg = cfg;
  rcfg.fwd = opts;
  out.rec = recover_pq(wd, rcfg);

  // The recovered p carries the true mean of the left half, which upgrades
  // omega0 from mod-1 to its actual value and fixes the kernel signs.
  out.triple = parity_fix(bt, mean_p(out.rec.cp));
  out.sigma_constant =
      sigma_shift(out.triple, out.rec.cp, {}, 1e-4, nullptr, opts);

  out.left = out.rec.cp;
  for (Cplx& s : out.left.sigma) s += out.sigma_constant;
  return out;
}

CoefficientPair stitch_halves(const CoefficientPair& left,
                              const CoefficientPair& right, int grid) {
  left.validate();
  right.validate();
  if (std::abs(left.b - right.a) > 1e-9)
    throw SchemaError("stitch: halves do not share an endpoint");
  if (grid < 5) throw SchemaError("stitch: grid too small");
  CoefficientPair cp;
  cp.a = left.a;
  cp.b = right.b;
  cp.p.assign(grid, 0.0);
  cp.sigma.assign(grid, 0.0);

  // Samples hold only the continuous part (jumps are re-attached explicitly,
  // so they must not also be baked into the interpolant).
  auto smooth_sigma = [](const CoefficientPair& h, double x) {
    Cplx s = eval_sigma(h, x);
    for (const auto& j : h.jumps)
      if (j.first <= x) s -= j.second;
    return s;
  };
  const Cplx seam_left = eval_sigma(left, left.b);   // total left limit
  const Cplx seam_right = eval_sigma(right, right.a);  // total right limit
  const Cplx smoothL = smooth_sigma(left, left.b);
  const Cplx smoothR = smooth_sigma(right, right.a);
  for (int i = 0; i < grid; ++i) {
    const double x = cp.a + (cp.b - cp.a) * i / (grid - 1);
    if (x <= left.b) {
      cp.p[i] = eval_p(left, x);
      cp.sigma[i] = smooth_sigma(left, x);
    } else {
      cp.p[i] = eval_p(right, x);
      cp.sigma[i] = smooth_sigma(right, x) - smoothR + smoothL;
    }
  }
  for (const auto& j : left.jumps) cp.jumps.push_back(j);
  // The sample shift plus the left jumps cancel against this seam jump for
  // x > pi, leaving exactly the right half's total sigma there.
  const Cplx offset = seam_right - seam_left;
  // rounding-level offsets would plant a spurious point mass in q
  if (std::abs(offset) > 1e-12) cp.jumps.push_back({left.b, offset});
  for (const auto& j : right.jumps) cp.jumps.push_back(j);
  std::sort(cp.jumps.begin(), cp.jumps.end(),
            [](const auto& u, const auto& v) { return u.first < v.first; });
  return cp;
}

}  // namespace pencilspec
