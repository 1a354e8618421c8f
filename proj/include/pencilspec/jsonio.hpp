#pragma once

#include <string>

#include "pencilspec/coefficients.hpp"
#include "pencilspec/conditions.hpp"
#include "pencilspec/entire.hpp"
#include "pencilspec/forward.hpp"
#include "pencilspec/halfinverse.hpp"
#include "pencilspec/inverse.hpp"
#include "pencilspec/kernels.hpp"
#include "pencilspec/recovery.hpp"

namespace pencilspec {

// JSON (de)serialization for every interchange object. Parsing is strict:
// wrong types, malformed complex values, and unknown keys all raise
// SchemaError. Complex numbers are accepted as bare reals or [re, im] pairs
// and always written as [re, im]. Dumps are deterministic (sorted keys,
// shortest round-trip doubles), which the CLI relies on for bit-identical
// reruns.
//
// Schemas:
//   problem      {"interval":[a,b], "p":[..], "sigma":[..],
//                 "jumps":[[x0,[re,im]],..]}            (jumps optional)
//   expr         {"op":"sin","arg":{"op":"axpb","a":1,"b":0}} and friends;
//                ops: const{value}, lambda, axpb{a,b}, poly{coeffs},
//                sum{terms}, product{factors}, neg{arg}, sin/cos/exp{arg},
//                solver{tag}. sin/cos/exp arguments must be lambda or axpb.
//   subspectrum  {"values":[..], "omega0_mod1":[re,im]}
//   triple       {"omega0":[re,im], "K":[[re,im],..], "N":[[re,im],..]}
//   weyl         {"omega0":[re,im], "thetas":[..],
//                 "rows":[{"theta":c,"nu":n,"value":c},..]}
//   recover cfg  {"basis_dim":8,"max_iter":40,"tikhonov":1e-8,
//                 "init":"asymptotic","complex_coeffs":false,
//                 "step_atoms":0,"grid":257}             (all optional)
//   half problem {"known_half":<problem>, "spectrum":[..],
//                 "known_mean":[re,im]}

CoefficientPair parse_problem(const std::string& text);
std::string dump_problem(const CoefficientPair& cp);

// Solver tags are accepted at parse time; evaluation fails later if the tag
// was never registered. axpb parses to a degree-1 polynomial node, so
// parse(dump(e)) preserves values rather than spelling.
ExprPtr parse_expr(const std::string& text);
std::string dump_expr(const ExprPtr& f);

Subspectrum parse_subspectrum(const std::string& text);
std::string dump_subspectrum(const Subspectrum& sub);

BoundaryTriple parse_triple(const std::string& text);
std::string dump_triple(const BoundaryTriple& bt);

WeylData parse_weyl(const std::string& text);
std::string dump_weyl(const WeylData& wd);

RecoveryConfig parse_recover_config(const std::string& text);
std::string dump_recover_config(const RecoveryConfig& cfg);

HalfProblem parse_half(const std::string& text);
std::string dump_half(const HalfProblem& hp);

std::string dump_report(const ConditionReport& rep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace pencilspec
