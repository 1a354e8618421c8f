#include "pencilspec/forward.hpp"

#include <algorithm>
#include <cmath>

namespace pencilspec {

namespace {

// Everything the RHS needs at one mesh sample:
//   y'  = sigma*y + y1
//   y1' = A*y - sigma*y1,          A = -sigma^2 + 2 lambda p - lambda^2
//   dy' = sigma*dy + dy1
//   dy1'= A*dy - sigma*dy1 + B*y,  B = 2p - 2 lambda
struct Sample {
  Cplx sg;
  Cplx A;
  Cplx B;
};

struct State {
  Cplx y, y1, dy, dy1;
};

template <bool V>
inline State rhs(const Sample& s, const State& u) {
  State d;
  d.y = s.sg * u.y + u.y1;
  d.y1 = s.A * u.y - s.sg * u.y1;
  if constexpr (V) {
    d.dy = s.sg * u.dy + u.dy1;
    d.dy1 = s.A * u.dy - s.sg * u.dy1 + s.B * u.y;
  }
  return d;
}

template <bool V>
inline State axpy(const State& u, double h, const State& d) {
  State r;
  r.y = u.y + h * d.y;
  r.y1 = u.y1 + h * d.y1;
  if constexpr (V) {
    r.dy = u.dy + h * d.dy;
    r.dy1 = u.dy1 + h * d.dy1;
  }
  return r;
}

template <bool V>
void rk4_segment(const std::vector<Sample>& smp, double h, State& u) {
  // smp holds 2n+1 samples: nodes and midpoints interleaved
  std::size_t n = (smp.size() - 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s0 = smp[2 * i];
    const Sample& sm = smp[2 * i + 1];
    const Sample& s1 = smp[2 * i + 2];
    State k1 = rhs<V>(s0, u);
    State k2 = rhs<V>(sm, axpy<V>(u, h / 2, k1));
    State k3 = rhs<V>(sm, axpy<V>(u, h / 2, k2));
    State k4 = rhs<V>(s1, axpy<V>(u, h, k3));
    u.y += h / 6 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    u.y1 += h / 6 * (k1.y1 + 2.0 * k2.y1 + 2.0 * k3.y1 + k4.y1);
    if constexpr (V) {
      u.dy += h / 6 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
      u.dy1 += h / 6 * (k1.dy1 + 2.0 * k2.dy1 + 2.0 * k3.dy1 + k4.dy1);
    }
  }
}

}  // namespace

ForwardResult integrate(const CoefficientPair& cp, Cplx lambda, Boundary init,
                        bool backward, const ForwardOpts& opts) {
  cp.validate();

  // breakpoints: interval ends plus jump locations
  std::vector<double> bp{cp.a, cp.b};
  for (auto& [x0, c] : cp.jumps) {
    (void)c;
    bp.push_back(x0);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  double density =
      std::max(opts.base_density, opts.phase_density * std::abs(lambda));

  State u{init.y, init.y1, 0.0, 0.0};
  static thread_local std::vector<Sample> smp;

  auto run_segment = [&](double s0, double s1) {
    // sigma's step part is constant on the open segment; right-continuity
    // means a jump at the segment's left edge is included.
    Cplx jumpsum = 0.0;
    double lo = std::min(s0, s1);
    for (auto& [x0, c] : cp.jumps)
      if (x0 <= lo) jumpsum += c;
    double len = std::abs(s1 - s0);
    auto n = std::size_t(std::ceil(len * density));
    n = std::max<std::size_t>(n, 1);
    if (n > (std::size_t(1) << 24))
      throw NumericalError("integrate", "step-size underflow");
    double h = (s1 - s0) / double(n);
    smp.resize(2 * n + 1);
    const double dxg = cp.dx();
    const double top = double(cp.sigma.size() - 1);
    for (std::size_t i = 0; i <= 2 * n; ++i) {
      double x = s0 + h / 2 * double(i);
      // sample the continuous parts directly; eval_sigma's x >= x0 rule would
      // pick the wrong side at a segment endpoint, the per-segment constant
      // jumpsum is the one-sided-correct value.
      double uu = (x - cp.a) / dxg;
      Cplx sgv, pv;
      if (uu <= 0.0) {
        sgv = cp.sigma.front();
        pv = cp.p.front();
      } else if (uu >= top) {
        sgv = cp.sigma.back();
        pv = cp.p.back();
      } else {
        auto ii = std::size_t(uu);
        double w = uu - double(ii);
        sgv = cp.sigma[ii] * (1.0 - w) + cp.sigma[ii + 1] * w;
        pv = cp.p[ii] * (1.0 - w) + cp.p[ii + 1] * w;
      }
      sgv += jumpsum;
      smp[i].sg = sgv;
      smp[i].A = -sgv * sgv + 2.0 * lambda * pv - lambda * lambda;
      smp[i].B = 2.0 * pv - 2.0 * lambda;
    }
    if (opts.variational)
      rk4_segment<true>(smp, h, u);
    else
      rk4_segment<false>(smp, h, u);
  };

  if (!backward) {
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) run_segment(bp[i], bp[i + 1]);
  } else {
    for (std::size_t i = bp.size() - 1; i > 0; --i) run_segment(bp[i], bp[i - 1]);
  }

  return {u.y, u.y1, u.dy, u.dy1};
}

ForwardResult boundary_S(const CoefficientPair& cp, Cplx lambda,
                         const ForwardOpts& opts) {
  return integrate(cp, lambda, {0.0, 1.0}, false, opts);
}

ForwardResult boundary_C(const CoefficientPair& cp, Cplx lambda,
                         const ForwardOpts& opts) {
  return integrate(cp, lambda, {1.0, 0.0}, false, opts);
}

Cplx wronskian(const CoefficientPair& cp, Cplx lambda, const ForwardOpts& opts) {
  ForwardResult s = boundary_S(cp, lambda, opts);
  ForwardResult c = boundary_C(cp, lambda, opts);
  return c.y * s.y1 - c.y1 * s.y;
}

Cplx char_fn(const CoefficientPair& cp, const ExprPtr& f1, const ExprPtr& f2,
             Cplx lambda, const ForwardOpts& opts) {
  ForwardResult s = boundary_S(cp, lambda, opts);
  return eval(f1, lambda) * s.y1 + eval(f2, lambda) * s.y;
}

std::pair<Cplx, Cplx> char_fn_d(const CoefficientPair& cp, const ExprPtr& f1,
                                const ExprPtr& f2, Cplx lambda,
                                const ForwardOpts& opts) {
  ForwardOpts o = opts;
  o.variational = true;
  ForwardResult s = boundary_S(cp, lambda, o);
  Cplx v1 = eval(f1, lambda), v2 = eval(f2, lambda);
  Cplx d1 = deriv(f1, lambda, 1), d2 = deriv(f2, lambda, 1);
  Cplx val = v1 * s.y1 + v2 * s.y;
  Cplx dval = d1 * s.y1 + v1 * s.dy1 + d2 * s.y + v2 * s.dy;
  return {val, dval};
}

}  // namespace pencilspec
