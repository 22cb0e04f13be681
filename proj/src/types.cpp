#include "aol/types.hpp"

#include <string>

namespace aol {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::RankDeficientData: return "RankDeficientData";
    case ErrorCode::TrivialKernel: return "TrivialKernel";
    case ErrorCode::DegenerateSelection: return "DegenerateSelection";
    case ErrorCode::NotInTangentSpace: return "NotInTangentSpace";
    case ErrorCode::NonTightOperator: return "NonTightOperator";
    case ErrorCode::CoverageGap: return "CoverageGap";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotConverged:
    case ErrorCode::RankDeficientData:
    case ErrorCode::TrivialKernel:
    case ErrorCode::DegenerateSelection:
    case ErrorCode::NotInTangentSpace:
    case ErrorCode::NonTightOperator:
    case ErrorCode::CoverageGap:
      return true;
    default:
      return false;
  }
}

void require_same_dim(Index expected, Index actual, const char* what) {
  if (expected != actual) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected " +
                                                  std::to_string(expected) + ", got " +
                                                  std::to_string(actual));
  }
}

NullSpaceBasis::NullSpaceBasis(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.cols() > 0 && basis_.cols() >= basis_.rows()) {
    throw Error(ErrorCode::InvalidArgument, "null space rank must be < n");
  }
  if (basis_.cols() > 0) {
    const Matrix gram = basis_.transpose() * basis_;
    const double err = (gram - Matrix::Identity(gram.rows(), gram.cols())).norm();
    if (err > tol::frame) {
      throw Error(ErrorCode::InvalidArgument,
                  "null space basis is not orthonormal (residual " + std::to_string(err) + ")");
    }
  }
}

NullSpaceBasis NullSpaceBasis::constant(Index n) {
  return NullSpaceBasis(Matrix::Constant(n, 1, 1.0 / std::sqrt(static_cast<double>(n))));
}

Matrix NullSpaceBasis::complement_projector() const {
  const Index n = basis_.rows();
  Matrix p = Matrix::Identity(n, n);
  if (basis_.cols() > 0) p.noalias() -= basis_ * basis_.transpose();
  return p;
}

AnalysisOperator::AnalysisOperator(Matrix entries, Kind kind)
    : entries_(std::move(entries)), kind_(kind) {
  if (entries_.rows() > 0) {
    row_norm_target_ =
        std::sqrt(static_cast<double>(entries_.cols()) / static_cast<double>(entries_.rows()));
  }
}

AnalysisOperator::AnalysisOperator(Matrix entries, double row_norm_target, Kind kind)
    : entries_(std::move(entries)), row_norm_target_(row_norm_target), kind_(kind) {
  if (!(row_norm_target_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "row norm target must be positive");
  }
}

SignalMatrix::SignalMatrix(Matrix entries, Role role) : entries_(std::move(entries)), role_(role) {
  if (entries_.cols() < 1) throw Error(ErrorCode::InvalidArgument, "signal matrix needs l >= 1");
  if (!entries_.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite signal entries");
}

}  // namespace aol
