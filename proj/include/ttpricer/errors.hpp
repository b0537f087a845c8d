#pragma once

#include <stdexcept>
#include <string>

namespace ttp {

// Error categories. Values are stable: the C API exposes them verbatim.
enum class ErrorCode : int {
  invalid_argument = 1,
  bounds = 2,
  domain = 3,
  structure = 4,
  size = 5,
  parameter = 6,
  decomposition = 7,
  convergence = 8,
  io = 9,
  internal = 10,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

struct BoundsError : Error {
  explicit BoundsError(const std::string& msg) : Error(ErrorCode::bounds, msg) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(ErrorCode::domain, msg) {}
};

struct StructureError : Error {
  explicit StructureError(const std::string& msg) : Error(ErrorCode::structure, msg) {}
};

struct SizeError : Error {
  explicit SizeError(const std::string& msg) : Error(ErrorCode::size, msg) {}
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& msg) : Error(ErrorCode::parameter, msg) {}
};

// Cholesky and friends report which pivot went bad.
struct DecompositionError : Error {
  DecompositionError(const std::string& msg, int pivot_index)
      : Error(ErrorCode::decomposition, msg), pivot(pivot_index) {}
  int pivot;
};

struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& msg) : Error(ErrorCode::convergence, msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(ErrorCode::io, msg) {}
};

}  // namespace ttp
