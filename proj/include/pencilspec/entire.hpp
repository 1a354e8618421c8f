#pragma once

#include <functional>
#include <memory>

#include "pencilspec/types.hpp"

namespace pencilspec {

// Entire functions of lambda used in boundary conditions, represented as a
// small closed expression tree. sin/cos/exp take an affine argument a*z+b,
// which keeps symbolic differentiation inside the node set.
struct EntireExpr;
using ExprPtr = std::shared_ptr<const EntireExpr>;

struct EntireExpr {
  enum class Op { Const, Lambda, Sum, Product, Neg, Sin, Cos, Exp, Poly, Solver };
  Op op = Op::Const;
  Cplx cval{};                  // Const
  Cplx a{}, b{};                // Sin/Cos/Exp argument a*z + b
  CVec coeffs;                  // Poly, ascending powers
  std::vector<ExprPtr> kids;    // Sum/Product/Neg
  std::string tag;              // Solver
  bool has_solver = false;
};

ExprPtr ex_const(Cplx c);
ExprPtr ex_lambda();
ExprPtr ex_sum(std::vector<ExprPtr> terms);
ExprPtr ex_product(std::vector<ExprPtr> factors);
ExprPtr ex_neg(ExprPtr e);
ExprPtr ex_sin(Cplx a, Cplx b);
ExprPtr ex_cos(Cplx a, Cplx b);
ExprPtr ex_exp(Cplx a, Cplx b);
ExprPtr ex_poly(CVec coeffs);
ExprPtr ex_solver(const std::string& tag);

// Callbacks backing solver nodes. Registration installs a memoizing wrapper;
// repeated evaluations at one lambda cost a hash lookup.
void register_solver(const std::string& tag, std::function<Cplx(Cplx)> fn);
bool solver_registered(const std::string& tag);
void clear_solvers();

Cplx eval(const ExprPtr& f, Cplx lambda);

// Scaled derivative f^{<nu>}(lambda) = f^{(nu)}(lambda)/nu!. Exact symbolic
// differentiation for pure trees; Cauchy contour quadrature (radius r, Q
// trapezoid nodes) whenever a solver node is present. nu is capped at 8.
Cplx deriv(const ExprPtr& f, Cplx lambda, int nu, double r = 0.1, int q = 32);

}  // namespace pencilspec
