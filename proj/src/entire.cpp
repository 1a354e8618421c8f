#include "pencilspec/entire.hpp"

#include <cmath>
#include <unordered_map>

namespace pencilspec {

namespace {

std::shared_ptr<EntireExpr> node(EntireExpr::Op op) {
  auto e = std::make_shared<EntireExpr>();
  e->op = op;
  return e;
}

bool any_solver(const std::vector<ExprPtr>& kids) {
  for (auto& k : kids)
    if (k->has_solver) return true;
  return false;
}

struct CplxKey {
  double re, im;
  bool operator==(const CplxKey& o) const { return re == o.re && im == o.im; }
};
struct CplxKeyHash {
  std::size_t operator()(const CplxKey& k) const {
    auto h1 = std::hash<double>{}(k.re);
    auto h2 = std::hash<double>{}(k.im);
    return h1 ^ (h2 * 0x9e3779b97f4a7c15ull);
  }
};

using SolverFn = std::function<Cplx(Cplx)>;

std::unordered_map<std::string, SolverFn>& registry() {
  static std::unordered_map<std::string, SolverFn> r;
  return r;
}

}  // namespace

ExprPtr ex_const(Cplx c) {
  auto e = node(EntireExpr::Op::Const);
  e->cval = c;
  return e;
}

ExprPtr ex_lambda() { return node(EntireExpr::Op::Lambda); }

ExprPtr ex_sum(std::vector<ExprPtr> terms) {
  auto e = node(EntireExpr::Op::Sum);
  e->has_solver = any_solver(terms);
  e->kids = std::move(terms);
  return e;
}

ExprPtr ex_product(std::vector<ExprPtr> factors) {
  auto e = node(EntireExpr::Op::Product);
  e->has_solver = any_solver(factors);
  e->kids = std::move(factors);
  return e;
}

ExprPtr ex_neg(ExprPtr f) {
  auto e = node(EntireExpr::Op::Neg);
  e->has_solver = f->has_solver;
  e->kids = {std::move(f)};
  return e;
}

static ExprPtr trig(EntireExpr::Op op, Cplx a, Cplx b) {
  auto e = node(op);
  e->a = a;
  e->b = b;
  return e;
}

ExprPtr ex_sin(Cplx a, Cplx b) { return trig(EntireExpr::Op::Sin, a, b); }
ExprPtr ex_cos(Cplx a, Cplx b) { return trig(EntireExpr::Op::Cos, a, b); }
ExprPtr ex_exp(Cplx a, Cplx b) { return trig(EntireExpr::Op::Exp, a, b); }

ExprPtr ex_poly(CVec coeffs) {
  auto e = node(EntireExpr::Op::Poly);
  e->coeffs = std::move(coeffs);
  return e;
}

ExprPtr ex_solver(const std::string& tag) {
  auto e = node(EntireExpr::Op::Solver);
  e->tag = tag;
  e->has_solver = true;
  return e;
}

void register_solver(const std::string& tag, SolverFn fn) {
  auto cache = std::make_shared<
      std::unordered_map<CplxKey, Cplx, CplxKeyHash>>();
  registry()[tag] = [cache, fn = std::move(fn)](Cplx z) {
    CplxKey k{z.real(), z.imag()};
    auto it = cache->find(k);
    if (it != cache->end()) return it->second;
    Cplx v = fn(z);
    (*cache)[k] = v;
    return v;
  };
}

bool solver_registered(const std::string& tag) {
  return registry().count(tag) > 0;
}

void clear_solvers() { registry().clear(); }

Cplx eval(const ExprPtr& f, Cplx z) {
  using Op = EntireExpr::Op;
  switch (f->op) {
    case Op::Const:
      return f->cval;
    case Op::Lambda:
      return z;
    case Op::Sum: {
      Cplx s = 0.0;
      for (auto& k : f->kids) s += eval(k, z);
      return s;
    }
    case Op::Product: {
      Cplx s = 1.0;
      for (auto& k : f->kids) s *= eval(k, z);
      return s;
    }
    case Op::Neg:
      return -eval(f->kids[0], z);
    case Op::Sin:
      return std::sin(f->a * z + f->b);
    case Op::Cos:
      return std::cos(f->a * z + f->b);
    case Op::Exp:
      return std::exp(f->a * z + f->b);
    case Op::Poly: {
      Cplx s = 0.0;
      for (auto it = f->coeffs.rbegin(); it != f->coeffs.rend(); ++it)
        s = s * z + *it;
      return s;
    }
    case Op::Solver: {
      auto it = registry().find(f->tag);
      if (it == registry().end())
        throw SchemaError("unregistered solver expression '" + f->tag + "'");
      return it->second(z);
    }
  }
  throw Error("unreachable expression op");
}

namespace {

ExprPtr d1(const ExprPtr& f) {
  using Op = EntireExpr::Op;
  switch (f->op) {
    case Op::Const:
      return ex_const(0.0);
    case Op::Lambda:
      return ex_const(1.0);
    case Op::Sum: {
      std::vector<ExprPtr> terms;
      terms.reserve(f->kids.size());
      for (auto& k : f->kids) terms.push_back(d1(k));
      return ex_sum(std::move(terms));
    }
    case Op::Product: {
      std::vector<ExprPtr> terms;
      for (std::size_t i = 0; i < f->kids.size(); ++i) {
        std::vector<ExprPtr> factors = f->kids;
        factors[i] = d1(f->kids[i]);
        terms.push_back(ex_product(std::move(factors)));
      }
      return ex_sum(std::move(terms));
    }
    case Op::Neg:
      return ex_neg(d1(f->kids[0]));
    case Op::Sin:
      return ex_product({ex_const(f->a), ex_cos(f->a, f->b)});
    case Op::Cos:
      return ex_product({ex_const(-f->a), ex_sin(f->a, f->b)});
    case Op::Exp:
      return ex_product({ex_const(f->a), ex_exp(f->a, f->b)});
    case Op::Poly: {
      if (f->coeffs.size() <= 1) return ex_const(0.0);
      CVec c(f->coeffs.size() - 1);
      for (std::size_t j = 1; j < f->coeffs.size(); ++j)
        c[j - 1] = f->coeffs[j] * double(j);
      return ex_poly(std::move(c));
    }
    case Op::Solver:
      throw Error("symbolic derivative reached a solver node");
  }
  throw Error("unreachable expression op");
}

}  // namespace

Cplx deriv(const ExprPtr& f, Cplx z, int nu, double r, int q) {
  if (nu < 0 || nu > 8)
    throw SchemaError("derivative order must lie in [0,8]");
  if (nu == 0) return eval(f, z);
  if (!f->has_solver) {
    ExprPtr g = f;
    double fact = 1.0;
    for (int m = 1; m <= nu; ++m) {
      g = d1(g);
      fact *= double(m);
    }
    return eval(g, z) / fact;
  }
  // Cauchy: f^{<nu>}(z) = (1/2pi) int f(z + r e^{i phi}) r^{-nu} e^{-i nu phi} dphi
  Cplx acc = 0.0;
  for (int k = 0; k < q; ++k) {
    double phi = 2.0 * kPi * double(k) / double(q);
    Cplx w = std::polar(1.0, phi);
    acc += eval(f, z + r * w) * std::polar(1.0, -nu * phi);
  }
  return acc / (double(q) * std::pow(r, nu));
}

}  // namespace pencilspec
