// pencilspec: command-line front end over the pencil library.
//
// Subcommands: forward, spectrum, invert, recover, check, half, roundtrip.
// Exit codes: 0 success, 2 malformed input (schema), 3 numerical failure
// (message carries the stage tag), 4 failed solvability/condition check.
// Every run writes <out>.manifest.json with input digests and parameters;
// reruns with an identical manifest produce byte-identical outputs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pencilspec/coefficients.hpp"
#include "pencilspec/conditions.hpp"
#include "pencilspec/entire.hpp"
#include "pencilspec/forward.hpp"
#include "pencilspec/halfinverse.hpp"
#include "pencilspec/inverse.hpp"
#include "pencilspec/jsonio.hpp"
#include "pencilspec/kernels.hpp"
#include "pencilspec/manifest.hpp"
#include "pencilspec/recovery.hpp"
#include "pencilspec/types.hpp"

namespace ps = pencilspec;
using ps::Cplx;
using ps::CVec;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(Cplx v) { return fmt(v.real()) + "," + fmt(v.imag()); }

struct Grid {
  double a = 0.0, b = 1.0;
  int n = 2;
};

Grid parse_grid(const std::string& s) {
  Grid g;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d", &g.a, &g.b, &g.n) != 3 || g.n < 1)
    throw ps::SchemaError("--lambda-grid expects a:b:n with n >= 1");
  return g;
}

ps::SearchBox parse_box(const std::string& s) {
  ps::SearchBox b{};
  if (std::sscanf(s.c_str(), "%lf:%lf:%lf:%lf", &b.re0, &b.re1, &b.im0,
                  &b.im1) != 4 ||
      b.re0 >= b.re1 || b.im0 >= b.im1)
    throw ps::SchemaError("--box expects re0:re1:im0:im1 with re0<re1, im0<im1");
  return b;
}

// mod-1 representative with Re in [0,1)
Cplx mod1(Cplx w) { return w - std::floor(w.real()); }

struct ExprPair {
  ps::ExprPtr f1, f2;
};

// boundary functions from files; Dirichlet y(pi)=0 when both are omitted
ExprPair load_pair(const std::string& f1path, const std::string& f2path,
                   ps::RunManifest& man) {
  ExprPair ep;
  if (f1path.empty() != f2path.empty())
    throw ps::SchemaError("--f1 and --f2 must be given together");
  if (f1path.empty()) {
    ep.f1 = ps::ex_const(0.0);
    ep.f2 = ps::ex_const(1.0);
    return ep;
  }
  std::string t1 = ps::read_file(f1path), t2 = ps::read_file(f2path);
  man.add_input(f1path, t1);
  man.add_input(f2path, t2);
  ep.f1 = ps::parse_expr(t1);
  ep.f2 = ps::parse_expr(t2);
  return ep;
}

int theta_count(int T) { return std::max(4, std::min(20, T / 3)); }

// ---- forward ---------------------------------------------------------------

struct ForwardArgs {
  std::string problem, f1, f2, out, grid;
};

void cmd_forward(const ForwardArgs& a) {
  ps::RunManifest man;
  man.command = "forward";
  std::string ptext = ps::read_file(a.problem);
  man.add_input(a.problem, ptext);
  ps::CoefficientPair cp = ps::parse_problem(ptext);
  ExprPair ep = load_pair(a.f1, a.f2, man);
  Grid g = parse_grid(a.grid);
  man.params["grid_n"] = g.n;
  man.outputs.push_back(a.out);

  std::string csv =
      "lambda_re,lambda_im,S_re,S_im,S1_re,S1_im,C_re,C_im,C1_re,C1_im,"
      "delta_re,delta_im,wronskian_re,wronskian_im\n";
  for (int i = 0; i < g.n; ++i) {
    double t = (g.n == 1) ? 0.0 : double(i) / double(g.n - 1);
    Cplx lam(g.a + (g.b - g.a) * t, 0.0);
    ps::ForwardResult S = ps::boundary_S(cp, lam);
    ps::ForwardResult C = ps::boundary_C(cp, lam);
    Cplx delta = ps::eval(ep.f1, lam) * S.y1 + ps::eval(ep.f2, lam) * S.y;
    Cplx w = C.y * S.y1 - C.y1 * S.y;
    csv += fmt(lam) + "," + fmt(S.y) + "," + fmt(S.y1) + "," + fmt(C.y) + "," +
           fmt(C.y1) + "," + fmt(delta) + "," + fmt(w) + "\n";
  }
  ps::write_file(a.out, csv);
  man.write(a.out);
  std::cout << "forward: wrote " << g.n << " rows to " << a.out << "\n";
}

// ---- spectrum ---------------------------------------------------------------

struct SpectrumArgs {
  std::string problem, f1, f2, out, box;
};

void cmd_spectrum(const SpectrumArgs& a) {
  ps::RunManifest man;
  man.command = "spectrum";
  std::string ptext = ps::read_file(a.problem);
  man.add_input(a.problem, ptext);
  ps::CoefficientPair cp = ps::parse_problem(ptext);
  ExprPair ep = load_pair(a.f1, a.f2, man);
  ps::SearchBox box = parse_box(a.box);
  man.outputs.push_back(a.out);

  ps::Subspectrum sub;
  sub.values = ps::eigenvalues(cp, ep.f1, ep.f2, box);
  sub.omega0_mod1 = mod1(ps::mean_p(cp));
  ps::write_file(a.out, ps::dump_subspectrum(sub));
  man.write(a.out);
  std::cout << "spectrum: " << sub.values.size() << " eigenvalues in box, "
            << "omega0_mod1 = " << fmt(sub.omega0_mod1) << "\n";
}

// ---- invert -----------------------------------------------------------------

struct InvertArgs {
  std::string sub, f1, f2, out, weyl;
  int trunc = 64;
  double tol = 1e-8;
  double omega0 = -1.0;  // <0 means: use the value stored in the file
};

void cmd_invert(const InvertArgs& a) {
  ps::RunManifest man;
  man.command = "invert";
  std::string stext = ps::read_file(a.sub);
  man.add_input(a.sub, stext);
  ps::Subspectrum sub = ps::parse_subspectrum(stext);
  if (a.omega0 >= 0.0) sub.omega0_mod1 = a.omega0;
  ExprPair ep = load_pair(a.f1, a.f2, man);
  man.params["trunc"] = a.trunc;
  man.params["tol"] = a.tol;
  man.outputs.push_back(a.out);

  ps::ConditionReport rep = ps::run_checks(sub, ep.f1, ep.f2);
  if (!rep.s.ok)
    throw ps::ConditionError("boundary functions vanish simultaneously on the data");
  if (!rep.a.ok)
    throw ps::ConditionError("subspectrum violates the imaginary-part bound");

  ps::MomentSystem ms = ps::build_moment_system(sub, ep.f1, ep.f2, a.trunc);
  ps::SolveResult sr = ps::solve_u(ms, 1e-10, a.tol);
  if (!sr.complete)
    throw ps::ConditionError(
        "moment system rank-deficient; subspectrum incomplete for this truncation");
  ps::BoundaryTriple bt = ps::reconstruct_triple(sr.u, ms.omega0_mod1);
  ps::write_file(a.out, ps::dump_triple(bt));
  man.write(a.out);
  std::cout << "invert: rows=" << ms.rows.size()
            << " row_gram_min=" << fmt(sr.row_gram_min)
            << " row_gram_cond=" << fmt(sr.row_gram_cond) << "\n";

  if (!a.weyl.empty()) {
    CVec thetas = ps::locate_thetas(bt, theta_count(a.trunc));
    ps::WeylData wd = ps::weyl_residues(bt, thetas);
    ps::write_file(a.weyl, ps::dump_weyl(wd));
    ps::RunManifest wm = man;
    wm.outputs = {a.weyl};
    wm.write(a.weyl);
    std::cout << "invert: wrote " << wd.rows.size() << " residue rows\n";
  }
}

// ---- recover ----------------------------------------------------------------

struct RecoverArgs {
  std::string weyl, config, out;
};

void cmd_recover(const RecoverArgs& a) {
  ps::RunManifest man;
  man.command = "recover";
  std::string wtext = ps::read_file(a.weyl);
  man.add_input(a.weyl, wtext);
  ps::WeylData wd = ps::parse_weyl(wtext);
  ps::RecoveryConfig cfg;
  if (!a.config.empty()) {
    std::string ctext = ps::read_file(a.config);
    man.add_input(a.config, ctext);
    cfg = ps::parse_recover_config(ctext);
  }
  man.params["basis_dim"] = cfg.basis_dim;
  man.params["tikhonov"] = cfg.tikhonov;
  man.outputs.push_back(a.out);

  ps::RecoveryResult rr = ps::recover_pq(wd, cfg);
  ps::write_file(a.out, ps::dump_problem(rr.cp));
  man.write(a.out);
  std::cout << "recover: misfit=" << fmt(rr.misfit)
            << " iterations=" << rr.iterations
            << " omega0_est=" << fmt(rr.omega0_est) << "\n";
}

// ---- check ------------------------------------------------------------------

struct CheckArgs {
  std::string sub, f1, f2, report;
  int trunc = 32;
};

int cmd_check(const CheckArgs& a) {
  ps::RunManifest man;
  man.command = "check";
  std::string stext = ps::read_file(a.sub);
  man.add_input(a.sub, stext);
  ps::Subspectrum sub = ps::parse_subspectrum(stext);
  ExprPair ep = load_pair(a.f1, a.f2, man);
  man.params["trunc"] = a.trunc;
  man.outputs.push_back(a.report);

  ps::ConditionReport rep =
      ps::run_checks(sub, ep.f1, ep.f2, 2.0 * ps::kPi, a.trunc);
  ps::write_file(a.report, ps::dump_report(rep));
  man.write(a.report);
  std::cout << "check: S=" << (rep.s.ok ? "ok" : "FAIL")
            << " A=" << (rep.a.ok ? "ok" : "FAIL")
            << " gram_sigma_min=" << fmt(rep.gram.sigma_min)
            << " gram_cond=" << fmt(rep.gram.cond) << "\n";
  // the report file is always written; the exit code still signals verdicts
  return (rep.s.ok && rep.a.ok) ? 0 : 4;
}

// ---- half -------------------------------------------------------------------

struct HalfArgs {
  std::string problem, config, out;
  int trunc = 64;
  bool verify = false;
};

void cmd_half(const HalfArgs& a) {
  ps::RunManifest man;
  man.command = "half";
  std::string ptext = ps::read_file(a.problem);
  man.add_input(a.problem, ptext);
  ps::HalfProblem hp = ps::parse_half(ptext);
  ps::RecoveryConfig cfg;
  if (!a.config.empty()) {
    std::string ctext = ps::read_file(a.config);
    man.add_input(a.config, ctext);
    cfg = ps::parse_recover_config(ctext);
  }
  man.params["trunc"] = a.trunc;
  man.outputs.push_back(a.out);

  ps::HalfResult hr = ps::solve_half(hp, cfg, a.trunc);
  ps::write_file(a.out, ps::dump_problem(hr.left));
  man.write(a.out);
  std::cout << "half: omega0_mod1=" << fmt(hr.omega0_mod1)
            << " sigma_constant=" << fmt(hr.sigma_constant)
            << " tail_spread=" << fmt(hr.tail_spread)
            << " misfit=" << fmt(hr.rec.misfit) << "\n";

  if (a.verify) {
    // spot verification: refine each data eigenvalue against the composite
    // problem rebuilt from the recovered left half and report the worst move
    ps::CoefficientPair comp = ps::stitch_halves(hr.left, hp.known_half);
    ps::ExprPtr f1 = ps::ex_const(0.0), f2 = ps::ex_const(1.0);
    double worst = 0.0;
    for (const Cplx& mu : hp.spectrum) {
      Cplx z = ps::refine_eigenvalue(comp, f1, f2, mu);
      worst = std::max(worst, std::abs(z - mu));
    }
    std::cout << "verify: spectrum misfit (max |mu - mu_recovered|) = "
              << fmt(worst) << " over " << hp.spectrum.size()
              << " eigenvalues\n";
  }
}

// ---- roundtrip ----------------------------------------------------------------

struct RoundtripArgs {
  std::string problem, out;
  int trunc = 64;
  unsigned seed = 1;
};

ps::CoefficientPair random_problem(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double ap[3], as[3];
  for (int j = 0; j < 3; ++j) {
    ap[j] = 0.15 * u(rng) / (1.0 + j);
    as[j] = 0.10 * u(rng) / (1.0 + j);
  }
  ps::CoefficientPair cp = ps::make_free(0.0, ps::kPi, 257);
  for (std::size_t i = 0; i < cp.p.size(); ++i) {
    double x = cp.a + cp.dx() * double(i);
    double pv = 0.0, sv = 0.0;
    for (int j = 0; j < 3; ++j) {
      pv += ap[j] * std::cos(j * x);
      sv += as[j] * (std::cos((j + 1) * x) - 1.0);
    }
    cp.p[i] = pv;
    cp.sigma[i] = sv;
  }
  return cp;
}

double rel_l2(const ps::CoefficientPair& got, const ps::CoefficientPair& want,
              bool sigma) {
  double num = 0.0, den = 0.0;
  int n = 512;
  for (int i = 0; i <= n; ++i) {
    double x = want.a + (want.b - want.a) * double(i) / n;
    Cplx g = sigma ? ps::eval_sigma(got, x) : ps::eval_p(got, x);
    Cplx w = sigma ? ps::eval_sigma(want, x) : ps::eval_p(want, x);
    num += std::norm(g - w);
    den += std::norm(w);
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1.0);
}

void cmd_roundtrip(const RoundtripArgs& a) {
  ps::RunManifest man;
  man.command = "roundtrip";
  man.params["trunc"] = a.trunc;
  man.params["seed"] = a.seed;
  man.outputs.push_back(a.out);

  ps::CoefficientPair cp;
  if (!a.problem.empty()) {
    std::string ptext = ps::read_file(a.problem);
    man.add_input(a.problem, ptext);
    cp = ps::parse_problem(ptext);
  } else {
    cp = random_problem(a.seed);
  }

  const int T = a.trunc;
  ps::ExprPtr f1 = ps::ex_const(0.0), f2 = ps::ex_const(1.0);

  // data: Dirichlet spectrum inside the truncation band, plus omega0 mod 1
  ps::EigOpts eo;
  Cplx w0 = ps::mean_p(cp);
  for (int k = -(T - 2); k <= T - 2; ++k)
    if (k != 0) eo.hints.push_back(double(k) + w0);
  ps::SearchBox box{-(double(T) - 1.5), double(T) - 1.5, -1.5, 1.5};
  ps::Subspectrum sub;
  sub.values = ps::eigenvalues(cp, f1, f2, box, eo);
  sub.omega0_mod1 = mod1(w0);

  ps::MomentSystem ms = ps::build_moment_system(sub, f1, f2, T);
  ps::SolveResult sr = ps::solve_u(ms);
  if (!sr.complete)
    throw ps::ConditionError("moment system rank-deficient in roundtrip");
  ps::BoundaryTriple bt = ps::reconstruct_triple(sr.u, sub.omega0_mod1);

  ps::BoundaryTriple ref = ps::extract_triple(cp, T);
  double kerr = 0.0, knorm = 0.0;
  for (int i = 0; i <= 2 * T; ++i) {
    kerr += std::norm(bt.K[i] - ref.K[i]) + std::norm(bt.N[i] - ref.N[i]);
    knorm += std::norm(ref.K[i]) + std::norm(ref.N[i]);
  }
  double kernel_l2 = std::sqrt(kerr) / std::max(std::sqrt(knorm), 1.0);

  CVec thetas = ps::locate_thetas(bt, theta_count(T));
  double terr = 0.0;
  for (const Cplx& th : thetas) {
    double best = 1e300;
    for (const Cplx& lam : sub.values) best = std::min(best, std::abs(th - lam));
    terr = std::max(terr, best);
  }

  ps::WeylData wd = ps::weyl_residues(ps::extract_triple(cp, T),
                                      ps::locate_thetas(ref, theta_count(T)));
  ps::RecoveryConfig cfg;
  ps::RecoveryResult rr = ps::recover_pq(wd, cfg);
  double perr = rel_l2(rr.cp, cp, false);
  ps::CoefficientPair sg = rr.cp;
  Cplx h = ps::sigma_shift(ps::parity_fix(bt, ps::mean_p(rr.cp)), sg);
  for (Cplx& s : sg.sigma) s += h;
  double serr = rel_l2(sg, cp, true);

  std::string csv = "quantity,value\n";
  csv += "kernel_l2," + fmt(kernel_l2) + "\n";
  csv += "theta_max," + fmt(terr) + "\n";
  csv += "p_rel_l2," + fmt(perr) + "\n";
  csv += "sigma_rel_l2," + fmt(serr) + "\n";
  ps::write_file(a.out, csv);
  man.write(a.out);
  std::cout << "roundtrip: kernel_l2=" << fmt(kernel_l2)
            << " theta_max=" << fmt(terr) << " p_rel_l2=" << fmt(perr)
            << " sigma_rel_l2=" << fmt(serr) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pencilspec: forward and inverse spectral problems for quadratic "
      "Sturm-Liouville pencils with distributional potentials"};
  app.require_subcommand(1);

  ForwardArgs fa;
  CLI::App* fw = app.add_subcommand("forward",
                                    "evaluate S, C, Delta on a lambda grid");
  fw->add_option("--problem", fa.problem, "problem JSON")->required();
  fw->add_option("--lambda-grid", fa.grid, "a:b:n real grid")->required();
  fw->add_option("--f1", fa.f1, "boundary function f1 JSON");
  fw->add_option("--f2", fa.f2, "boundary function f2 JSON");
  fw->add_option("--out", fa.out, "output CSV path")->required();

  SpectrumArgs sa;
  CLI::App* sp = app.add_subcommand("spectrum", "eigenvalues in a box");
  sp->add_option("--problem", sa.problem, "problem JSON")->required();
  sp->add_option("--f1", sa.f1, "boundary function f1 JSON");
  sp->add_option("--f2", sa.f2, "boundary function f2 JSON");
  sp->add_option("--box", sa.box, "re0:re1:im0:im1 search box")->required();
  sp->add_option("--out", sa.out, "output subspectrum JSON")->required();

  InvertArgs ia;
  CLI::App* iv = app.add_subcommand("invert",
                                    "reconstruct the boundary triple");
  iv->add_option("--subspectrum", ia.sub, "subspectrum JSON")->required();
  iv->add_option("--omega0-mod1", ia.omega0,
                 "override omega0 mod 1 (real value in [0,1))");
  iv->add_option("--f1", ia.f1, "boundary function f1 JSON");
  iv->add_option("--f2", ia.f2, "boundary function f2 JSON");
  iv->add_option("--trunc", ia.trunc, "truncation order T");
  iv->add_option("--tol", ia.tol, "completeness tolerance");
  iv->add_option("--out", ia.out, "output triple JSON")->required();
  iv->add_option("--emit-weyl", ia.weyl, "also write Weyl data JSON");

  RecoverArgs ra;
  CLI::App* rc = app.add_subcommand("recover", "recover p, sigma from Weyl data");
  rc->add_option("--weyl", ra.weyl, "Weyl data JSON")->required();
  rc->add_option("--config", ra.config, "recovery config JSON");
  rc->add_option("--out", ra.out, "output problem JSON")->required();

  CheckArgs ca;
  CLI::App* ck = app.add_subcommand("check", "condition diagnostics");
  ck->add_option("--subspectrum", ca.sub, "subspectrum JSON")->required();
  ck->add_option("--f1", ca.f1, "boundary function f1 JSON");
  ck->add_option("--f2", ca.f2, "boundary function f2 JSON");
  ck->add_option("--trunc", ca.trunc, "Gram section size");
  ck->add_option("--report", ca.report, "output report JSON")->required();

  HalfArgs ha;
  CLI::App* hf = app.add_subcommand("half", "half-inverse reconstruction");
  hf->add_option("--problem", ha.problem, "half problem JSON")->required();
  hf->add_option("--trunc", ha.trunc, "truncation order T");
  hf->add_option("--recover", ha.config, "recovery config JSON");
  hf->add_option("--out", ha.out, "output left-half problem JSON")->required();
  hf->add_flag("--verify", ha.verify,
               "re-solve the composite forward problem and print misfit");

  RoundtripArgs ta;
  CLI::App* rt = app.add_subcommand("roundtrip",
                                    "forward + inverse on one problem");
  rt->add_option("--problem", ta.problem,
                 "problem JSON (omitted: seeded random problem)");
  rt->add_option("--trunc", ta.trunc, "truncation order T");
  rt->add_option("--seed", ta.seed, "seed for the generated problem");
  rt->add_option("--out", ta.out, "output error-table CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(fw)) cmd_forward(fa);
    if (app.got_subcommand(sp)) cmd_spectrum(sa);
    if (app.got_subcommand(iv)) cmd_invert(ia);
    if (app.got_subcommand(rc)) cmd_recover(ra);
    if (app.got_subcommand(ck)) return cmd_check(ca);
    if (app.got_subcommand(hf)) cmd_half(ha);
    if (app.got_subcommand(rt)) cmd_roundtrip(ta);
  } catch (const ps::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ps::ConditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ps::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
