#include "pencilspec/recovery.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

namespace pencilspec {

std::vector<int> enumerate_skip_zero(const CVec& values, double spacing) {
  const int M = int(values.size());
  if (M < 2) throw SchemaError("enumerate: need at least two values");
  if (!(spacing > 0.0)) throw SchemaError("enumerate: bad spacing");
  for (int j = 1; j < M; ++j)
    if (values[j].real() < values[j - 1].real())
      throw SchemaError("enumerate: values not sorted by real part");

  // Cut position g: entries before it get k = j - g < 0, after it
  // k = j - g + 1 > 0. The correct cut minimizes the spread of the offsets
  // values[j] - k_j * spacing.
  int best_g = 0;
  double best_spread = 1e300;
  for (int g = 0; g <= M; ++g) {
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < M; ++j) {
      const int k = j < g ? j - g : j - g + 1;
      const double r = values[j].real() - k * spacing;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (hi - lo < best_spread) {
      best_spread = hi - lo;
      best_g = g;
    }
  }
  std::vector<int> out(M);
  for (int j = 0; j < M; ++j) out[j] = j < best_g ? j - best_g : j - best_g + 1;
  return out;
}

namespace {

struct Basis {
  int B;            // cosine modes for p
  int steps;        // jump atoms in sigma
  int grid;
  bool cplx;
  // complex slots: p modes, sigma modes, one height per step atom
  int np() const { return 2 * B - 1 + steps; }
  // plus one real location parameter per step atom
  int nreal() const { return (cplx ? 2 * np() : np()) + steps; }

  Cplx coeff(const std::vector<double>& x, int i) const {
    return cplx ? Cplx(x[2 * i], x[2 * i + 1]) : Cplx(x[i], 0.0);
  }

  CoefficientPair build(const std::vector<double>& x) const {
    CoefficientPair cp;
    cp.a = 0.0;
    cp.b = kPi;
    cp.p.assign(grid, 0.0);
    cp.sigma.assign(grid, 0.0);
    for (int i = 0; i < grid; ++i) {
      const double t = kPi * i / (grid - 1);
      Cplx pv = 0.0, sv = 0.0;
      for (int j = 0; j < B; ++j) pv += coeff(x, j) * std::cos(j * t);
      // sigma modes vanish at x = 0: that is the recovery gauge.
      for (int j = 1; j < B; ++j)
        sv += coeff(x, B - 1 + j) * (std::cos(j * t) - 1.0);
      cp.p[i] = pv;
      cp.sigma[i] = sv;
    }
    const int locs = cplx ? 2 * np() : np();
    for (int s = 0; s < steps; ++s) {
      const double loc =
          std::clamp(x[locs + s], cp.a + 1e-3, cp.b - 1e-3);
      cp.jumps.push_back({loc, coeff(x, 2 * B - 1 + s)});
    }
    return cp;
  }
};

struct DataRow {
  Cplx theta;
  int k = 0;        // signed enumeration index
  bool has_m = false;
  Cplx m_value = 0.0;
  double weight = 1.0;
};

}  // namespace

RecoveryResult recover_pq(const WeylData& wd, const RecoveryConfig& cfg) {
  if (cfg.basis_dim < 1 || cfg.max_iter < 1 || cfg.tikhonov < 0.0 ||
      cfg.grid < 9 || cfg.step_atoms < 0)
    throw SchemaError("recover: bad config");
  if (cfg.init != "zero" && cfg.init != "asymptotic")
    throw SchemaError("recover: init must be 'zero' or 'asymptotic'");
  if (wd.thetas.empty()) throw SchemaError("recover: empty data");

  // Unique thetas with their enumeration indices and order-0 values.
  CVec uniq;
  for (const Cplx& t : wd.thetas)
    if (uniq.empty() || std::abs(t - uniq.back()) > 1e-7 * (1.0 + std::abs(t)))
      uniq.push_back(t);
  if (int(uniq.size()) < 2 * cfg.basis_dim)
    throw SchemaError("recover: fewer than 2*basis_dim data points");
  std::vector<int> idx = enumerate_skip_zero(uniq, 1.0);

  std::vector<DataRow> data(uniq.size());
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    data[i].theta = uniq[i];
    data[i].k = idx[i];
    data[i].weight = 1.0 / ((1.0 + std::abs(idx[i])) * (1.0 + std::abs(idx[i])));
  }
  for (const WeylRow& row : wd.rows) {
    if (row.nu != 0) continue;
    for (DataRow& d : data)
      if (std::abs(row.theta - d.theta) < 1e-7 * (1.0 + std::abs(d.theta))) {
        d.has_m = true;
        d.m_value = row.value;
        break;
      }
  }

  RecoveryResult out;
  {
    Cplx acc = 0.0;
    for (const DataRow& d : data) acc += d.theta - double(d.k);
    out.omega0_est = acc / double(data.size());
  }

  Basis basis{cfg.basis_dim, cfg.step_atoms, cfg.grid, cfg.complex_coeffs};
  std::vector<double> x(basis.nreal(), 0.0);
  if (cfg.init == "asymptotic") {
    x[0] = out.omega0_est.real();
    if (cfg.complex_coeffs) x[1] = out.omega0_est.imag();
  }
  for (int s = 0; s < cfg.step_atoms; ++s)  // spread initial jump locations
    x[basis.nreal() - cfg.step_atoms + s] =
        kPi * (s + 1.0) / (cfg.step_atoms + 1.0);

  const double sqtik = std::sqrt(cfg.tikhonov);
  auto residual = [&](const std::vector<double>& xv) {
    CoefficientPair cp = basis.build(xv);
    std::vector<double> r;
    r.reserve(4 * data.size() + xv.size());
    ForwardOpts fo = cfg.fwd;
    fo.variational = true;
    for (const DataRow& d : data) {
      // First evaluation is at the data theta itself: its S value is the
      // zero-misfit residual. Newton then walks to the candidate's own zero
      // of lambda*S, where the candidate's Weyl value lives.
      Cplx z = d.theta;
      ForwardResult fr = boundary_S(cp, z, fo);
      r.push_back(fr.y.real());
      r.push_back(fr.y.imag());
      if (!d.has_m) continue;
      for (int it = 0; it < 5; ++it) {
        const Cplx g = z * fr.y;
        const Cplx gp = fr.y + z * fr.dy;
        if (std::abs(gp) < 1e-300) break;
        const Cplx step = g / gp;
        z -= step;
        fr = boundary_S(cp, z, fo);
        if (std::abs(step) < 1e-12 * (1.0 + std::abs(z))) break;
      }
      const Cplx denom = fr.y1 * fr.dy;
      if (std::abs(denom) < 1e-300)
        throw NumericalError("recover", "candidate Weyl value degenerate");
      const Cplx dm = (1.0 / denom - d.m_value) * std::sqrt(d.weight);
      r.push_back(dm.real());
      r.push_back(dm.imag());
    }
    for (double v : xv) r.push_back(sqtik * v);
    for (double v : r)
      if (!std::isfinite(v))
        throw NumericalError("recover", "non-finite residual");
    return r;
  };

  auto objective = [](const std::vector<double>& r) {
    double f = 0.0;
    for (double v : r) f += v * v;
    return f;
  };

  std::vector<double> r0 = residual(x);
  double f0 = objective(r0);
  out.objective.push_back(f0);

  const int P = basis.nreal();
  const int R = int(r0.size());
  double mu = 1e-3;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    Eigen::MatrixXd J(R, P);
    for (int j = 0; j < P; ++j) {
      std::vector<double> xp = x;
      const double dj = 3e-6 * (1.0 + std::abs(x[j]));
      xp[j] += dj;
      std::vector<double> rp = residual(xp);
      if (int(rp.size()) != R)
        throw NumericalError("recover", "residual size changed");
      for (int i = 0; i < R; ++i) J(i, j) = (rp[i] - r0[i]) / dj;
    }
    Eigen::VectorXd rv(R);
    for (int i = 0; i < R; ++i) rv(i) = r0[i];
    Eigen::MatrixXd H = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * rv;
    const double hscale = std::max(H.diagonal().maxCoeff(), 1e-300);

    bool accepted = false;
    for (int tries = 0; tries < 10; ++tries) {
      Eigen::MatrixXd Hd = H;
      Hd.diagonal().array() += mu * hscale;
      Eigen::VectorXd step = Hd.ldlt().solve(-g);
      if (!step.allFinite())
        throw NumericalError("recover", "Jacobian rank collapse");
      std::vector<double> xt = x;
      for (int j = 0; j < P; ++j) xt[j] += step(j);
      std::vector<double> rt = residual(xt);
      const double ft = objective(rt);
      if (ft < f0) {
        double xnorm = 0.0;
        for (double v : xt) xnorm += v * v;
        x = xt;
        r0 = rt;
        f0 = ft;
        out.objective.push_back(f0);
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        out.iterations = iter + 1;
        if (step.norm() < 1e-10 * (1.0 + std::sqrt(xnorm)))
          iter = cfg.max_iter;  // converged in the parameters
        break;
      }
      mu *= 4.0;
    }
    if (!accepted) break;  // damping exhausted: local minimum reached
    if (out.objective.size() >= 2) {
      const double prev = out.objective[out.objective.size() - 2];
      if (prev - f0 < 1e-14 * (1.0 + f0)) break;
    }
  }

  out.cp = basis.build(x);
  double tikpart = 0.0;
  for (double v : x) tikpart += cfg.tikhonov * v * v;
  out.misfit = f0 - tikpart;
  return out;
}

}  // namespace pencilspec
