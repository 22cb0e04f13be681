#pragma once

#include <stdexcept>
#include <string>

namespace aol {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  NotConverged,
  RankDeficientData,
  TrivialKernel,
  DegenerateSelection,
  NotInTangentSpace,
  NonTightOperator,
  CoverageGap,
  Io,
  Config,
};

const char* to_string(ErrorCode code);

// Numerical and contract failures raised by the library. Warnings that do
// not stop a computation (rank-deficient projections, stalled line search)
// are reported through result structs instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& what, double frame_residual, double row_residual)
      : Error(ErrorCode::NotConverged, what),
        frame_residual_(frame_residual),
        row_residual_(row_residual) {}

  double frame_residual() const noexcept { return frame_residual_; }
  double row_residual() const noexcept { return row_residual_; }

 private:
  double frame_residual_;
  double row_residual_;
};

// True for the codes the CLI maps to "numerical failure".
bool is_numerical(ErrorCode code);

}  // namespace aol
