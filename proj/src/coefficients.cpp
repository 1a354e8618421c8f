#include "pencilspec/coefficients.hpp"

#include <algorithm>
#include <cmath>

namespace pencilspec {

void CoefficientPair::validate() const {
  if (!(b > a)) throw SchemaError("interval must satisfy b > a");
  if (p.size() < 2) throw SchemaError("p needs at least 2 samples");
  if (sigma.size() != p.size())
    throw SchemaError("p and sigma must share one grid");
  for (auto& [x0, c] : jumps) {
    if (!(x0 > a && x0 < b))
      throw SchemaError("sigma jump outside the open interval");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw SchemaError("sigma jump height must be finite");
  }
  auto finite = [](const CVec& v) {
    for (const Cplx& z : v)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  };
  if (!finite(p) || !finite(sigma))
    throw SchemaError("coefficient samples must be finite");
}

namespace {

Cplx lerp_grid(const CVec& s, double a, double dx, double x) {
  double u = (x - a) / dx;
  auto n = double(s.size() - 1);
  if (u <= 0.0) return s.front();
  if (u >= n) return s.back();
  auto i = std::size_t(u);
  double w = u - double(i);
  return s[i] * (1.0 - w) + s[i + 1] * w;
}

}  // namespace

Cplx eval_p(const CoefficientPair& cp, double x) {
  return lerp_grid(cp.p, cp.a, cp.dx(), x);
}

Cplx eval_sigma(const CoefficientPair& cp, double x) {
  Cplx v = lerp_grid(cp.sigma, cp.a, cp.dx(), x);
  for (auto& [x0, c] : cp.jumps)
    if (x >= x0) v += c;  // right limit at the jump point itself
  return v;
}

Cplx mean_p(const CoefficientPair& cp) {
  Cplx acc = 0.5 * (cp.p.front() + cp.p.back());
  for (std::size_t i = 1; i + 1 < cp.p.size(); ++i) acc += cp.p[i];
  return acc * cp.dx() / (cp.b - cp.a);
}

CoefficientPair make_free(double a, double b, std::size_t grid) {
  CoefficientPair cp;
  cp.a = a;
  cp.b = b;
  cp.p.assign(grid, 0.0);
  cp.sigma.assign(grid, 0.0);
  return cp;
}

CoefficientPair sample_pair(double a, double b, std::size_t grid,
                            Cplx (*pf)(double), Cplx (*sf)(double)) {
  CoefficientPair cp;
  cp.a = a;
  cp.b = b;
  cp.p.resize(grid);
  cp.sigma.resize(grid);
  double dx = (b - a) / double(grid - 1);
  for (std::size_t i = 0; i < grid; ++i) {
    double x = a + dx * double(i);
    cp.p[i] = pf ? pf(x) : Cplx(0);
    cp.sigma[i] = sf ? sf(x) : Cplx(0);
  }
  return cp;
}

}  // namespace pencilspec
