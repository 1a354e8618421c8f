#include "pencilspec/jsonio.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

namespace pencilspec {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw SchemaError(msg); }

json parse_text(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) bad(std::string(what) + ": invalid JSON");
  return j;
}

const json& req(const json& obj, const char* key, const char* what) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(std::string(what) + ": missing key '" + key + "'");
  return *it;
}

void expect_keys(const json& obj, std::initializer_list<const char*> keys,
                 const char* what) {
  if (!obj.is_object()) bad(std::string(what) + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys)
      if (item.key() == k) known = true;
    if (!known)
      bad(std::string(what) + ": unknown key '" + item.key() + "'");
  }
}

double as_real(const json& v, const char* what) {
  if (!v.is_number()) bad(std::string(what) + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const char* what) {
  if (!v.is_number_integer()) bad(std::string(what) + ": expected an integer");
  return v.get<int>();
}

Cplx as_complex(const json& v, const char* what) {
  if (v.is_number()) return Cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Cplx(v[0].get<double>(), v[1].get<double>());
  bad(std::string(what) + ": expected a number or [re, im]");
}

CVec as_cvec(const json& v, const char* what) {
  if (!v.is_array()) bad(std::string(what) + ": expected an array");
  CVec out;
  out.reserve(v.size());
  for (const json& e : v) out.push_back(as_complex(e, what));
  return out;
}

json cplx(Cplx c) { return json::array({c.real(), c.imag()}); }

json cvec(const CVec& v) {
  json out = json::array();
  for (const Cplx& c : v) out.push_back(cplx(c));
  return out;
}

std::string finish(const json& j) { return j.dump(2) + "\n"; }

CoefficientPair problem_from_json(const json& j, const char* what) {
  expect_keys(j, {"interval", "p", "sigma", "jumps"}, what);
  const json& iv = req(j, "interval", what);
  if (!iv.is_array() || iv.size() != 2)
    bad(std::string(what) + ": interval must be [a, b]");
  CoefficientPair cp;
  cp.a = as_real(iv[0], what);
  cp.b = as_real(iv[1], what);
  cp.p = as_cvec(req(j, "p", what), what);
  cp.sigma = as_cvec(req(j, "sigma", what), what);
  if (j.contains("jumps")) {
    const json& js = j["jumps"];
    if (!js.is_array()) bad(std::string(what) + ": jumps must be an array");
    for (const json& e : js) {
      if (!e.is_array() || e.size() != 2)
        bad(std::string(what) + ": each jump must be [x0, height]");
      cp.jumps.emplace_back(as_real(e[0], what), as_complex(e[1], what));
    }
  }
  cp.validate();
  return cp;
}

json problem_to_json(const CoefficientPair& cp) {
  json j;
  j["interval"] = json::array({cp.a, cp.b});
  j["p"] = cvec(cp.p);
  j["sigma"] = cvec(cp.sigma);
  json js = json::array();
  for (const auto& [x0, c] : cp.jumps) js.push_back(json::array({x0, cplx(c)}));
  j["jumps"] = js;
  return j;
}

// affine argument of sin/cos/exp: "lambda" or "axpb"
std::pair<Cplx, Cplx> affine_arg(const json& j, const char* what) {
  if (!j.is_object()) bad(std::string(what) + ": arg must be an object");
  std::string op = req(j, "op", what).is_string()
                       ? req(j, "op", what).get<std::string>()
                       : std::string();
  if (op == "lambda") {
    expect_keys(j, {"op"}, what);
    return {Cplx(1.0), Cplx(0.0)};
  }
  if (op == "axpb") {
    expect_keys(j, {"op", "a", "b"}, what);
    return {as_complex(req(j, "a", what), what),
            as_complex(req(j, "b", what), what)};
  }
  bad(std::string(what) + ": arg must be 'lambda' or 'axpb'");
}

ExprPtr expr_from_json(const json& j) {
  const char* what = "expr";
  if (!j.is_object()) bad("expr: node must be an object");
  const json& opj = req(j, "op", what);
  if (!opj.is_string()) bad("expr: op must be a string");
  const std::string op = opj.get<std::string>();

  if (op == "const") {
    expect_keys(j, {"op", "value"}, what);
    return ex_const(as_complex(req(j, "value", what), what));
  }
  if (op == "lambda") {
    expect_keys(j, {"op"}, what);
    return ex_lambda();
  }
  if (op == "axpb") {
    expect_keys(j, {"op", "a", "b"}, what);
    return ex_poly({as_complex(req(j, "b", what), what),
                    as_complex(req(j, "a", what), what)});
  }
  if (op == "poly") {
    expect_keys(j, {"op", "coeffs"}, what);
    CVec c = as_cvec(req(j, "coeffs", what), what);
    if (c.empty()) bad("expr: poly needs at least one coefficient");
    return ex_poly(std::move(c));
  }
  if (op == "sum" || op == "product") {
    const char* key = (op == "sum") ? "terms" : "factors";
    expect_keys(j, {"op", key}, what);
    const json& kids = req(j, key, what);
    if (!kids.is_array() || kids.empty())
      bad(std::string("expr: ") + key + " must be a non-empty array");
    std::vector<ExprPtr> parts;
    for (const json& k : kids) parts.push_back(expr_from_json(k));
    return (op == "sum") ? ex_sum(std::move(parts))
                         : ex_product(std::move(parts));
  }
  if (op == "neg") {
    expect_keys(j, {"op", "arg"}, what);
    return ex_neg(expr_from_json(req(j, "arg", what)));
  }
  if (op == "sin" || op == "cos" || op == "exp") {
    expect_keys(j, {"op", "arg"}, what);
    auto [a, b] = affine_arg(req(j, "arg", what), what);
    if (op == "sin") return ex_sin(a, b);
    if (op == "cos") return ex_cos(a, b);
    return ex_exp(a, b);
  }
  if (op == "solver") {
    expect_keys(j, {"op", "tag"}, what);
    const json& tag = req(j, "tag", what);
    if (!tag.is_string()) bad("expr: solver tag must be a string");
    return ex_solver(tag.get<std::string>());
  }
  bad("expr: unknown op '" + op + "'");
}

json expr_to_json(const ExprPtr& f) {
  if (!f) bad("expr: null node");
  json j;
  auto affine = [&](const char* op) {
    j["op"] = op;
    j["arg"] = json{{"op", "axpb"}, {"a", cplx(f->a)}, {"b", cplx(f->b)}};
  };
  switch (f->op) {
    case EntireExpr::Op::Const:
      j["op"] = "const";
      j["value"] = cplx(f->cval);
      break;
    case EntireExpr::Op::Lambda:
      j["op"] = "lambda";
      break;
    case EntireExpr::Op::Sum:
    case EntireExpr::Op::Product: {
      const bool sum = f->op == EntireExpr::Op::Sum;
      j["op"] = sum ? "sum" : "product";
      json kids = json::array();
      for (const ExprPtr& k : f->kids) kids.push_back(expr_to_json(k));
      j[sum ? "terms" : "factors"] = kids;
      break;
    }
    case EntireExpr::Op::Neg:
      j["op"] = "neg";
      j["arg"] = expr_to_json(f->kids.at(0));
      break;
    case EntireExpr::Op::Sin:
      affine("sin");
      break;
    case EntireExpr::Op::Cos:
      affine("cos");
      break;
    case EntireExpr::Op::Exp:
      affine("exp");
      break;
    case EntireExpr::Op::Poly:
      j["op"] = "poly";
      j["coeffs"] = cvec(f->coeffs);
      break;
    case EntireExpr::Op::Solver:
      j["op"] = "solver";
      j["tag"] = f->tag;
      break;
  }
  return j;
}

}  // namespace

CoefficientPair parse_problem(const std::string& text) {
  return problem_from_json(parse_text(text, "problem"), "problem");
}

std::string dump_problem(const CoefficientPair& cp) {
  return finish(problem_to_json(cp));
}

ExprPtr parse_expr(const std::string& text) {
  return expr_from_json(parse_text(text, "expr"));
}

std::string dump_expr(const ExprPtr& f) { return finish(expr_to_json(f)); }

Subspectrum parse_subspectrum(const std::string& text) {
  const char* what = "subspectrum";
  json j = parse_text(text, what);
  expect_keys(j, {"values", "omega0_mod1"}, what);
  Subspectrum sub;
  sub.values = as_cvec(req(j, "values", what), what);
  sub.omega0_mod1 = as_complex(req(j, "omega0_mod1", what), what);
  return sub;
}

std::string dump_subspectrum(const Subspectrum& sub) {
  json j;
  j["values"] = cvec(sub.values);
  j["omega0_mod1"] = cplx(sub.omega0_mod1);
  return finish(j);
}

BoundaryTriple parse_triple(const std::string& text) {
  const char* what = "triple";
  json j = parse_text(text, what);
  expect_keys(j, {"omega0", "K", "N"}, what);
  BoundaryTriple bt;
  bt.omega0 = as_complex(req(j, "omega0", what), what);
  bt.K = as_cvec(req(j, "K", what), what);
  bt.N = as_cvec(req(j, "N", what), what);
  bt.validate();
  return bt;
}

std::string dump_triple(const BoundaryTriple& bt) {
  json j;
  j["omega0"] = cplx(bt.omega0);
  j["K"] = cvec(bt.K);
  j["N"] = cvec(bt.N);
  return finish(j);
}

WeylData parse_weyl(const std::string& text) {
  const char* what = "weyl";
  json j = parse_text(text, what);
  expect_keys(j, {"omega0", "thetas", "rows"}, what);
  WeylData wd;
  wd.omega0 = as_complex(req(j, "omega0", what), what);
  wd.thetas = as_cvec(req(j, "thetas", what), what);
  const json& rows = req(j, "rows", what);
  if (!rows.is_array()) bad("weyl: rows must be an array");
  for (const json& r : rows) {
    expect_keys(r, {"theta", "nu", "value"}, what);
    WeylRow row;
    row.theta = as_complex(req(r, "theta", what), what);
    row.nu = as_int(req(r, "nu", what), what);
    if (row.nu < 0) bad("weyl: nu must be nonnegative");
    row.value = as_complex(req(r, "value", what), what);
    wd.rows.push_back(row);
  }
  return wd;
}

std::string dump_weyl(const WeylData& wd) {
  json j;
  j["omega0"] = cplx(wd.omega0);
  j["thetas"] = cvec(wd.thetas);
  json rows = json::array();
  for (const WeylRow& r : wd.rows)
    rows.push_back(json{
        {"theta", cplx(r.theta)}, {"nu", r.nu}, {"value", cplx(r.value)}});
  j["rows"] = rows;
  return finish(j);
}

RecoveryConfig parse_recover_config(const std::string& text) {
  const char* what = "recover config";
  json j = parse_text(text, what);
  expect_keys(j,
              {"basis_dim", "max_iter", "tikhonov", "init", "complex_coeffs",
               "step_atoms", "grid"},
              what);
  RecoveryConfig cfg;
  if (j.contains("basis_dim")) cfg.basis_dim = as_int(j["basis_dim"], what);
  if (j.contains("max_iter")) cfg.max_iter = as_int(j["max_iter"], what);
  if (j.contains("tikhonov")) cfg.tikhonov = as_real(j["tikhonov"], what);
  if (j.contains("init")) {
    if (!j["init"].is_string()) bad("recover config: init must be a string");
    cfg.init = j["init"].get<std::string>();
    if (cfg.init != "zero" && cfg.init != "asymptotic")
      bad("recover config: init must be 'zero' or 'asymptotic'");
  }
  if (j.contains("complex_coeffs")) {
    if (!j["complex_coeffs"].is_boolean())
      bad("recover config: complex_coeffs must be a bool");
    cfg.complex_coeffs = j["complex_coeffs"].get<bool>();
  }
  if (j.contains("step_atoms")) cfg.step_atoms = as_int(j["step_atoms"], what);
  if (j.contains("grid")) cfg.grid = as_int(j["grid"], what);
  if (cfg.basis_dim < 1) bad("recover config: basis_dim must be >= 1");
  if (cfg.tikhonov < 0) bad("recover config: tikhonov must be >= 0");
  if (cfg.step_atoms < 0) bad("recover config: step_atoms must be >= 0");
  if (cfg.grid < 9) bad("recover config: grid must be >= 9");
  return cfg;
}

std::string dump_recover_config(const RecoveryConfig& cfg) {
  json j;
  j["basis_dim"] = cfg.basis_dim;
  j["max_iter"] = cfg.max_iter;
  j["tikhonov"] = cfg.tikhonov;
  j["init"] = cfg.init;
  j["complex_coeffs"] = cfg.complex_coeffs;
  j["step_atoms"] = cfg.step_atoms;
  j["grid"] = cfg.grid;
  return finish(j);
}

HalfProblem parse_half(const std::string& text) {
  const char* what = "half problem";
  json j = parse_text(text, what);
  expect_keys(j, {"known_half", "spectrum", "known_mean"}, what);
  HalfProblem hp;
  hp.known_half = problem_from_json(req(j, "known_half", what), what);
  hp.spectrum = as_cvec(req(j, "spectrum", what), what);
  hp.known_mean = as_complex(req(j, "known_mean", what), what);
  hp.validate();
  return hp;
}

std::string dump_half(const HalfProblem& hp) {
  json j;
  j["known_half"] = problem_to_json(hp.known_half);
  j["spectrum"] = cvec(hp.spectrum);
  j["known_mean"] = cplx(hp.known_mean);
  return finish(j);
}

std::string dump_report(const ConditionReport& rep) {
  json j;
  j["S"] = json{{"ok", rep.s.ok},
                {"min_value", rep.s.min_value},
                {"min_ratio", rep.s.min_ratio}};
  j["A"] = json{
      {"ok", rep.a.ok}, {"max_im", rep.a.max_im}, {"n0", rep.a.n0}};
  j["gram"] = json{{"sigma_min", rep.gram.sigma_min},
                   {"cond", rep.gram.cond},
                   {"self_min", rep.gram.self_min},
                   {"note", "finite-section proxy"}};
  j["ok"] = rep.s.ok && rep.a.ok;
  return finish(j);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write file: " + path);
  out << content;
  if (!out) throw SchemaError("cannot write file: " + path);
}

}  // namespace pencilspec
