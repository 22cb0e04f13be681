#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>

#include "aol/error.hpp"

namespace aol {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Numerical tolerances shared across the library.
namespace tol {
inline constexpr double frame = 1e-8;      // ||W^T W - I||_F for tight frames
inline constexpr double row = 1e-8;        // | ||w_i|| - c |
inline constexpr double svd = 1e-10;       // min singular value before warning
inline constexpr double sign = 1e-12;      // |z| at or below counts as zero for sgn
inline constexpr double zero_row = 1e-12;  // row norm treated as a zero row
inline constexpr double tight_gram = 1e-4; // Gram residual accepted by the DRS scaling shortcut
}  // namespace tol

// Orthonormal basis (n x r) of a prescribed kernel N of the operator.
class NullSpaceBasis {
 public:
  NullSpaceBasis() = default;
  // Throws InvalidArgument unless the columns are orthonormal to tol::frame
  // and r < n.
  explicit NullSpaceBasis(Matrix basis);

  // Single normalized constant column, i.e. the DC component of R^n.
  static NullSpaceBasis constant(Index n);

  const Matrix& basis() const { return basis_; }
  Index dim() const { return basis_.rows(); }
  Index rank() const { return basis_.cols(); }
  bool empty() const { return basis_.cols() == 0; }

  // P_{N-perp} = I - N N^T (n x n).
  Matrix complement_projector() const;

 private:
  Matrix basis_;
};

// Admissible set for the operator: plain UNTF, or UNTF restricted to a
// prescribed null space.
struct Constraint {
  std::optional<NullSpaceBasis> null_space;

  static Constraint untf() { return {}; }
  static Constraint with_null_space(NullSpaceBasis ns) { return {std::move(ns)}; }

  bool has_null_space() const { return null_space.has_value() && !null_space->empty(); }
  Index null_rank() const { return null_space ? null_space->rank() : 0; }

  // Row norm forced by the trace identity: a c^2 = tr(W^T W) = n - r.
  double row_norm_target(Index a, Index n) const {
    return std::sqrt(static_cast<double>(n - null_rank()) / static_cast<double>(a));
  }
};

// a x n analysis operator. Rows are the analysis atoms.
class AnalysisOperator {
 public:
  enum class Kind { Frame, NonTight };

  AnalysisOperator() = default;
  // Row norm target defaults to sqrt(n / a).
  explicit AnalysisOperator(Matrix entries, Kind kind = Kind::Frame);
  AnalysisOperator(Matrix entries, double row_norm_target, Kind kind = Kind::Frame);

  const Matrix& matrix() const { return entries_; }
  Index rows() const { return entries_.rows(); }
  Index cols() const { return entries_.cols(); }
  double row_norm_target() const { return row_norm_target_; }
  Kind kind() const { return kind_; }
  bool flagged_non_tight() const { return kind_ == Kind::NonTight; }

  AnalysisOperator with_matrix(Matrix entries) const {
    return AnalysisOperator(std::move(entries), row_norm_target_, kind_);
  }

 private:
  Matrix entries_;
  double row_norm_target_ = 1.0;
  Kind kind_ = Kind::Frame;
};

// n x l matrix of signals, one per column.
class SignalMatrix {
 public:
  enum class Role { Clean, Observed };

  SignalMatrix() = default;
  // Throws InvalidArgument on non-finite entries or zero columns.
  explicit SignalMatrix(Matrix entries, Role role = Role::Clean);

  const Matrix& matrix() const { return entries_; }
  Index dim() const { return entries_.rows(); }
  Index count() const { return entries_.cols(); }
  Role role() const { return role_; }

 private:
  Matrix entries_;
  Role role_ = Role::Clean;
};

void require_same_dim(Index expected, Index actual, const char* what);

// Contiguous view of a dense matrix's storage (column-major).
inline std::span<const double> flat(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
inline std::span<double> flat(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

}  // namespace aol
