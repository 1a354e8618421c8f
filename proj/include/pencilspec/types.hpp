#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace pencilspec {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;

inline constexpr double kPi = std::numbers::pi;

// Error taxonomy mirrors the CLI exit codes: schema problems (2), numerical
// failures tagged with the pipeline stage that raised them (3), and failed
// solvability/condition checks (4).
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SchemaError : Error {
  explicit SchemaError(const std::string& msg) : Error("schema: " + msg) {}
};

struct NumericalError : Error {
  std::string stage;
  NumericalError(std::string stage_, const std::string& msg)
      : Error(stage_ + ": " + msg), stage(std::move(stage_)) {}
};

struct ConditionError : Error {
  explicit ConditionError(const std::string& msg)
      : Error("condition: " + msg) {}
};

}  // namespace pencilspec
