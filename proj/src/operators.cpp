#include "aol/operators.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

#include "aol/kernels.hpp"

namespace aol {

namespace {

// U_k V_k^T from the leading k singular pairs of m.
Matrix polar_factor(const Matrix& m, Index keep, ProjectionReport* report) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smin = keep > 0 ? s(keep - 1) : 0.0;
  const bool deficient = keep > 0 && smin < tol::svd;
  if (report != nullptr) {
    report->rank_deficient = deficient;
    report->min_singular_value = smin;
  }
  if (deficient) {
    spdlog::debug("tight-frame projection of a rank-deficient matrix (sigma_min = {:.3e})", smin);
  }
  return svd.matrixU().leftCols(keep) * svd.matrixV().leftCols(keep).transpose();
}

}  // namespace

AnalysisOperator project_un(const AnalysisOperator& op, Rng& rng) {
  const double c = op.row_norm_target();
  Matrix w = op.matrix();
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < w.rows(); ++i) {
    const double norm = w.row(i).norm();
    if (norm < tol::zero_row) {
      for (Index j = 0; j < w.cols(); ++j) w(i, j) = normal(rng);
      w.row(i) *= c / w.row(i).norm();
    } else {
      w.row(i) *= c / norm;
    }
  }
  return op.with_matrix(std::move(w));
}

AnalysisOperator project_tf(const AnalysisOperator& op, ProjectionReport* report) {
  if (op.rows() < op.cols()) {
    throw Error(ErrorCode::InvalidArgument, "tight-frame projection needs a >= n");
  }
  return op.with_matrix(polar_factor(op.matrix(), op.cols(), report));
}

AnalysisOperator project_tf_perp_null(const AnalysisOperator& op, const NullSpaceBasis& ns,
                                      ProjectionReport* report) {
  if (op.rows() < op.cols()) {
    throw Error(ErrorCode::InvalidArgument, "tight-frame projection needs a >= n");
  }
  if (ns.empty()) return project_tf(op, report);
  require_same_dim(op.cols(), ns.dim(), "null space dimension");
  const Matrix& basis = ns.basis();
  Matrix projected = op.matrix();
  projected.noalias() -= (op.matrix() * basis) * basis.transpose();
  return op.with_matrix(polar_factor(projected, op.cols() - ns.rank(), report));
}

double frame_residual(const Matrix& w, const Constraint& constraint) {
  const Index n = w.cols();
  Matrix gram = w.transpose() * w;
  if (constraint.has_null_space()) {
    gram -= constraint.null_space->complement_projector();
  } else {
    gram -= Matrix::Identity(n, n);
  }
  return gram.norm();
}

double row_residual(const Matrix& w, double c) {
  double worst = 0.0;
  for (Index i = 0; i < w.rows(); ++i) worst = std::max(worst, std::abs(w.row(i).norm() - c));
  return worst;
}

UntfResult untf_project(const AnalysisOperator& op, const Constraint& constraint, int max_alt,
                        double tol, Rng& rng) {
  if (max_alt < 1) throw Error(ErrorCode::InvalidArgument, "max_alt must be >= 1");
  const double c = constraint.row_norm_target(op.rows(), op.cols());
  UntfResult result;
  result.op = AnalysisOperator(op.matrix(), c, op.kind());
  for (int it = 1; it <= max_alt; ++it) {
    ProjectionReport rep;
    AnalysisOperator tf = constraint.has_null_space()
                              ? project_tf_perp_null(result.op, *constraint.null_space, &rep)
                              : project_tf(result.op, &rep);
    result.rank_deficient = result.rank_deficient || rep.rank_deficient;
    result.op = project_un(tf, rng);
    result.iterations = it;
    result.frame_residual = frame_residual(result.op.matrix(), constraint);
    result.row_residual = row_residual(result.op.matrix(), c);
    result.frame_trace.push_back(result.frame_residual);
    if (result.frame_residual <= tol && result.row_residual <= tol) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) {
    spdlog::debug("untf_project: not converged after {} pairs (frame {:.3e}, row {:.3e})",
                  result.iterations, result.frame_residual, result.row_residual);
  }
  return result;
}

double objective_l1(const AnalysisOperator& op, const Matrix& x) {
  require_same_dim(op.cols(), x.rows(), "objective_l1 signal dimension");
  const Matrix z = op.matrix() * x;
  return kernels::abs_sum(flat(z));
}

Matrix subgradient(const AnalysisOperator& op, const Matrix& x, Rng& rng) {
  require_same_dim(op.cols(), x.rows(), "subgradient signal dimension");
  const Matrix z = op.matrix() * x;
  Matrix s(z.rows(), z.cols());
  const std::size_t zeros = kernels::dead_zone_sign(flat(z), flat(s), tol::sign);
  if (zeros > 0) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (Index k = 0; k < z.size(); ++k) {
      if (std::abs(z.data()[k]) <= tol::sign) s.data()[k] = uniform(rng);
    }
  }
  return s * x.transpose();
}

}  // namespace aol
