// Python bindings for the core operations: coefficient containers, forward
// solves, eigenvalue search, the inverse pipeline, recovery, and the
// half-inverse driver. Complex vectors cross the boundary as python lists.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pencilspec/coefficients.hpp"
#include "pencilspec/conditions.hpp"
#include "pencilspec/entire.hpp"
#include "pencilspec/forward.hpp"
#include "pencilspec/halfinverse.hpp"
#include "pencilspec/inverse.hpp"
#include "pencilspec/jsonio.hpp"
#include "pencilspec/kernels.hpp"
#include "pencilspec/recovery.hpp"
#include "pencilspec/types.hpp"

namespace py = pybind11;
using namespace pencilspec;

namespace {
// value wrapper: ExprPtr aliases shared_ptr<const EntireExpr>, whose const
// element type does not work as a pybind11 holder
struct PyExpr {
  ExprPtr p;
};
}  // namespace

PYBIND11_MODULE(_pencilspec, m) {
  m.doc() = "quadratic Sturm-Liouville pencils: forward and inverse solvers";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);
  py::register_exception<ConditionError>(m, "ConditionError",
                                         PyExc_RuntimeError);

  py::class_<CoefficientPair>(m, "CoefficientPair")
      .def(py::init<>())
      .def_readwrite("a", &CoefficientPair::a)
      .def_readwrite("b", &CoefficientPair::b)
      .def_readwrite("p", &CoefficientPair::p)
      .def_readwrite("sigma", &CoefficientPair::sigma)
      .def_readwrite("jumps", &CoefficientPair::jumps)
      .def("validate", &CoefficientPair::validate)
      .def("dx", &CoefficientPair::dx);

  m.def("make_free", &make_free, py::arg("a") = 0.0, py::arg("b") = kPi,
        py::arg("grid") = std::size_t{129});
  m.def("eval_p", &eval_p);
  m.def("eval_sigma", &eval_sigma);
  m.def("mean_p", &mean_p);

  // expressions
  py::class_<PyExpr>(m, "Expr");
  m.def("ex_const", [](Cplx c) { return PyExpr{ex_const(c)}; });
  m.def("ex_lambda", [] { return PyExpr{ex_lambda()}; });
  m.def("ex_sum", [](const std::vector<PyExpr>& terms) {
    std::vector<ExprPtr> ts;
    for (const PyExpr& t : terms) ts.push_back(t.p);
    return PyExpr{ex_sum(std::move(ts))};
  });
  m.def("ex_product", [](const std::vector<PyExpr>& factors) {
    std::vector<ExprPtr> fs;
    for (const PyExpr& f : factors) fs.push_back(f.p);
    return PyExpr{ex_product(std::move(fs))};
  });
  m.def("ex_neg", [](const PyExpr& e) { return PyExpr{ex_neg(e.p)}; });
  m.def("ex_sin", [](Cplx a, Cplx b) { return PyExpr{ex_sin(a, b)}; });
  m.def("ex_cos", [](Cplx a, Cplx b) { return PyExpr{ex_cos(a, b)}; });
  m.def("ex_exp", [](Cplx a, Cplx b) { return PyExpr{ex_exp(a, b)}; });
  m.def("ex_poly", [](CVec coeffs) { return PyExpr{ex_poly(std::move(coeffs))}; });
  m.def("ex_solver", [](const std::string& tag) { return PyExpr{ex_solver(tag)}; });
  m.def("register_solver", &register_solver);
  m.def("eval_expr", [](const PyExpr& f, Cplx lam) { return eval(f.p, lam); });
  m.def(
      "deriv_expr",
      [](const PyExpr& f, Cplx lam, int nu, double r, int q) {
        return deriv(f.p, lam, nu, r, q);
      },
      py::arg("f"), py::arg("lam"), py::arg("nu"), py::arg("r") = 0.1,
      py::arg("q") = 32);

  // forward
  py::class_<ForwardResult>(m, "ForwardResult")
      .def_readonly("y", &ForwardResult::y)
      .def_readonly("y1", &ForwardResult::y1)
      .def_readonly("dy", &ForwardResult::dy)
      .def_readonly("dy1", &ForwardResult::dy1);
  py::class_<ForwardOpts>(m, "ForwardOpts")
      .def(py::init<>())
      .def_readwrite("base_density", &ForwardOpts::base_density)
      .def_readwrite("phase_density", &ForwardOpts::phase_density)
      .def_readwrite("variational", &ForwardOpts::variational);
  m.def("boundary_S", &boundary_S, py::arg("cp"), py::arg("lam"),
        py::arg("opts") = ForwardOpts{});
  m.def("boundary_C", &boundary_C, py::arg("cp"), py::arg("lam"),
        py::arg("opts") = ForwardOpts{});
  m.def("wronskian", &wronskian, py::arg("cp"), py::arg("lam"),
        py::arg("opts") = ForwardOpts{});
  m.def(
      "char_fn",
      [](const CoefficientPair& cp, const PyExpr& f1, const PyExpr& f2,
         Cplx lam, const ForwardOpts& opts) {
        return char_fn(cp, f1.p, f2.p, lam, opts);
      },
      py::arg("cp"), py::arg("f1"), py::arg("f2"), py::arg("lam"),
      py::arg("opts") = ForwardOpts{});

  py::class_<SearchBox>(m, "SearchBox")
      .def(py::init([](double re0, double re1, double im0, double im1) {
             return SearchBox{re0, re1, im0, im1};
           }),
           py::arg("re0"), py::arg("re1"), py::arg("im0"), py::arg("im1"));
  py::class_<EigOpts>(m, "EigOpts")
      .def(py::init<>())
      .def_readwrite("cluster_tol", &EigOpts::cluster_tol)
      .def_readwrite("hints", &EigOpts::hints);
  m.def(
      "eigenvalues",
      [](const CoefficientPair& cp, const PyExpr& f1, const PyExpr& f2,
         const SearchBox& box, const EigOpts& opts) {
        return eigenvalues(cp, f1.p, f2.p, box, opts);
      },
      py::arg("cp"), py::arg("f1"), py::arg("f2"), py::arg("box"),
      py::arg("opts") = EigOpts{});

  py::class_<Subspectrum>(m, "Subspectrum")
      .def(py::init<>())
      .def_readwrite("values", &Subspectrum::values)
      .def_readwrite("omega0_mod1", &Subspectrum::omega0_mod1);

  // kernels
  py::class_<BoundaryTriple>(m, "BoundaryTriple")
      .def(py::init<>())
      .def_readwrite("omega0", &BoundaryTriple::omega0)
      .def_readwrite("K", &BoundaryTriple::K)
      .def_readwrite("N", &BoundaryTriple::N)
      .def("half", &BoundaryTriple::half);
  m.def("extract_triple", &extract_triple, py::arg("cp"),
        py::arg("half_width"), py::arg("opts") = ForwardOpts{});
  m.def("eval_S", &eval_S, py::arg("bt"), py::arg("lam"));
  m.def("eval_S1", &eval_S1, py::arg("bt"), py::arg("lam"), py::arg("nu") = 0);
  m.def("eval_g", &eval_g, py::arg("bt"), py::arg("lam"), py::arg("nu") = 0);
  m.def("tail_R", &tail_R, py::arg("half_width"), py::arg("lam"),
        py::arg("nu") = 0);
  m.def("tail_amplitude", &tail_amplitude, py::arg("samples"));

  // inverse pipeline
  py::class_<HVector>(m, "HVector")
      .def(py::init<>())
      .def_readwrite("first", &HVector::first)
      .def_readwrite("second", &HVector::second)
      .def("half", &HVector::half);
  m.def("hv_inner", &hv_inner, py::arg("g"), py::arg("h"));
  py::class_<MomentSystem>(m, "MomentSystem")
      .def_readonly("T", &MomentSystem::T)
      .def_readonly("omega0_mod1", &MomentSystem::omega0_mod1)
      .def_readonly("rows", &MomentSystem::rows)
      .def_readonly("rhs", &MomentSystem::rhs)
      .def_readonly("row_lambda", &MomentSystem::row_lambda)
      .def_readonly("row_nu", &MomentSystem::row_nu)
      .def_readonly("tail_first", &MomentSystem::tail_first)
      .def_readonly("tail_second", &MomentSystem::tail_second);
  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("u", &SolveResult::u)
      .def_readonly("ridge", &SolveResult::ridge)
      .def_readonly("row_gram_min", &SolveResult::row_gram_min)
      .def_readonly("row_gram_cond", &SolveResult::row_gram_cond)
      .def_readonly("active_min_rel", &SolveResult::active_min_rel)
      .def_readonly("complete", &SolveResult::complete);
  m.def("reconstruct_triple", &reconstruct_triple, py::arg("u"),
        py::arg("omega0"));
  m.def(
      "build_moment_system",
      [](const Subspectrum& sub, const PyExpr& f1, const PyExpr& f2, int T) {
        return build_moment_system(sub, f1.p, f2.p, T);
      },
      py::arg("sub"), py::arg("f1"), py::arg("f2"), py::arg("T"));
  m.def("solve_u", &solve_u, py::arg("ms"), py::arg("ridge_scale") = 1e-10,
        py::arg("completeness_tol") = 1e-8);
  m.def(
      "invert_subspectrum",
      [](const Subspectrum& sub, const PyExpr& f1, const PyExpr& f2, int T) {
        MomentSystem ms = build_moment_system(sub, f1.p, f2.p, T);
        SolveResult sr = solve_u(ms);
        if (!sr.complete)
          throw ConditionError("moment system rank-deficient; data incomplete");
        return reconstruct_triple(sr.u, ms.omega0_mod1);
      },
      py::arg("sub"), py::arg("f1"), py::arg("f2"), py::arg("T"),
      "build + solve the moment system and rebuild the boundary triple");
  m.def("locate_thetas", &locate_thetas, py::arg("bt"), py::arg("count"));

  py::class_<WeylRow>(m, "WeylRow")
      .def(py::init<>())
      .def_readwrite("theta", &WeylRow::theta)
      .def_readwrite("nu", &WeylRow::nu)
      .def_readwrite("value", &WeylRow::value);
  py::class_<WeylData>(m, "WeylData")
      .def(py::init<>())
      .def_readwrite("omega0", &WeylData::omega0)
      .def_readwrite("thetas", &WeylData::thetas)
      .def_readwrite("rows", &WeylData::rows);
  m.def("weyl_residues", &weyl_residues);
  m.def("parity_fix", &parity_fix);
  m.def(
      "sigma_shift",
      [](const BoundaryTriple& bt, const CoefficientPair& cand,
         const CVec& probes) { return sigma_shift(bt, cand, probes); },
      py::arg("bt"), py::arg("candidate"), py::arg("probes") = CVec{});

  // recovery
  py::class_<RecoveryConfig>(m, "RecoveryConfig")
      .def(py::init<>())
      .def_readwrite("basis_dim", &RecoveryConfig::basis_dim)
      .def_readwrite("max_iter", &RecoveryConfig::max_iter)
      .def_readwrite("tikhonov", &RecoveryConfig::tikhonov)
      .def_readwrite("init", &RecoveryConfig::init)
      .def_readwrite("complex_coeffs", &RecoveryConfig::complex_coeffs)
      .def_readwrite("step_atoms", &RecoveryConfig::step_atoms)
      .def_readwrite("grid", &RecoveryConfig::grid);
  py::class_<RecoveryResult>(m, "RecoveryResult")
      .def_readonly("cp", &RecoveryResult::cp)
      .def_readonly("misfit", &RecoveryResult::misfit)
      .def_readonly("iterations", &RecoveryResult::iterations)
      .def_readonly("objective", &RecoveryResult::objective)
      .def_readonly("omega0_est", &RecoveryResult::omega0_est);
  m.def("recover_pq", &recover_pq, py::arg("wd"),
        py::arg("cfg") = RecoveryConfig{});

  // conditions
  py::class_<SCheck>(m, "SCheck")
      .def_readonly("ok", &SCheck::ok)
      .def_readonly("min_value", &SCheck::min_value)
      .def_readonly("min_ratio", &SCheck::min_ratio);
  py::class_<ACheck>(m, "ACheck")
      .def_readonly("ok", &ACheck::ok)
      .def_readonly("max_im", &ACheck::max_im)
      .def_readonly("n0", &ACheck::n0);
  py::class_<GramDiag>(m, "GramDiag")
      .def_readonly("sigma_min", &GramDiag::sigma_min)
      .def_readonly("cond", &GramDiag::cond)
      .def_readonly("self_min", &GramDiag::self_min);
  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("s", &ConditionReport::s)
      .def_readonly("a", &ConditionReport::a)
      .def_readonly("gram", &ConditionReport::gram);
  m.def(
      "check_S",
      [](const Subspectrum& sub, const PyExpr& f1, const PyExpr& f2,
         double tol) { return check_S(sub, f1.p, f2.p, tol); },
      py::arg("sub"), py::arg("f1"), py::arg("f2"), py::arg("tol") = 1e-9);
  m.def("check_A", &check_A, py::arg("sub"), py::arg("im_bound") = 10.0);
  m.def("gram_diagnostic", &gram_diagnostic, py::arg("sub"),
        py::arg("halfwidth"), py::arg("T"));
  m.def(
      "run_checks",
      [](const Subspectrum& sub, const PyExpr& f1, const PyExpr& f2,
         double halfwidth, int T) {
        return run_checks(sub, f1.p, f2.p, halfwidth, T);
      },
      py::arg("sub"), py::arg("f1"), py::arg("f2"),
      py::arg("halfwidth") = 2.0 * kPi, py::arg("T") = 32);

  // half-inverse
  py::class_<HalfProblem>(m, "HalfProblem")
      .def(py::init<>())
      .def_readwrite("known_half", &HalfProblem::known_half)
      .def_readwrite("spectrum", &HalfProblem::spectrum)
      .def_readwrite("known_mean", &HalfProblem::known_mean)
      .def("validate", &HalfProblem::validate);
  py::class_<HalfResult>(m, "HalfResult")
      .def_readonly("left", &HalfResult::left)
      .def_readonly("triple", &HalfResult::triple)
      .def_readonly("rec", &HalfResult::rec)
      .def_readonly("sigma_constant", &HalfResult::sigma_constant)
      .def_readonly("omega0_mod1", &HalfResult::omega0_mod1)
      .def_readonly("tail_spread", &HalfResult::tail_spread);
  m.def("phi_at_midpoint", &phi_at_midpoint, py::arg("known_half"),
        py::arg("lam"), py::arg("opts") = ForwardOpts{});
  m.def("estimate_omega0_mod1",
        [](const CVec& spectrum, Cplx known_mean) {
          return estimate_omega0_mod1(spectrum, known_mean);
        });
  m.def(
      "solve_half",
      [](const HalfProblem& hp, const RecoveryConfig& cfg, int T) {
        return solve_half(hp, cfg, T);
      },
      py::arg("hp"), py::arg("cfg") = RecoveryConfig{}, py::arg("T") = 64);
  m.def("stitch_halves", &stitch_halves, py::arg("left"), py::arg("right"),
        py::arg("grid") = 513);

  // JSON interop with the CLI file formats
  m.def("parse_problem", &parse_problem);
  m.def("dump_problem", &dump_problem);
  m.def("parse_triple", &parse_triple);
  m.def("dump_triple", &dump_triple);
  m.def("parse_subspectrum", &parse_subspectrum);
  m.def("dump_subspectrum", &dump_subspectrum);
  m.def("parse_weyl", &parse_weyl);
  m.def("dump_weyl", &dump_weyl);
  m.def("parse_expr",
        [](const std::string& text) { return PyExpr{parse_expr(text)}; });
  m.def("dump_expr", [](const PyExpr& f) { return dump_expr(f.p); });

  m.attr("PI") = kPi;
}
