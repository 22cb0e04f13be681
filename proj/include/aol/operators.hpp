#pragma once

#include <vector>

#include "aol/rng.hpp"
#include "aol/types.hpp"

namespace aol {

// Outcome flags of an SVD-based projection. A rank-deficient input is still
// projected (all retained singular values are replaced by one); the flag is
// a warning, not a failure.
struct ProjectionReport {
  bool rank_deficient = false;
  double min_singular_value = 0.0;
};

// Scale every row to norm c = op.row_norm_target(). Rows with norm below
// tol::zero_row are replaced by a random direction on the sphere of radius c.
AnalysisOperator project_un(const AnalysisOperator& op, Rng& rng);

// Nearest tight frame: U I_{a x n} V^T for the SVD W = U S V^T.
AnalysisOperator project_tf(const AnalysisOperator& op, ProjectionReport* report = nullptr);

// Nearest tight frame on the complement of a prescribed null space: the SVD
// of W P_{N-perp} with the leading n - r singular values set to one and the
// trailing r set to zero.
AnalysisOperator project_tf_perp_null(const AnalysisOperator& op, const NullSpaceBasis& ns,
                                      ProjectionReport* report = nullptr);

// ||W^T W - G||_F with G = I, or P_{N-perp} under a null-space constraint.
double frame_residual(const Matrix& w, const Constraint& constraint = {});
// max_i | ||w_i|| - c |
double row_residual(const Matrix& w, double c);

struct UntfResult {
  AnalysisOperator op;
  double frame_residual = 0.0;
  double row_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool rank_deficient = false;
  std::vector<double> frame_trace;  // frame residual after each TF/UN pair
};

// Alternating projections TF (or TF-perp-N) then UN until both residuals
// are below tol or max_alt pairs ran. Non-convergence is reported through
// UntfResult::converged; callers decide whether it is fatal. The output's
// row norm target is set from the constraint.
UntfResult untf_project(const AnalysisOperator& op, const Constraint& constraint, int max_alt,
                        double tol, Rng& rng);

// sum_ij |(W X)_ij|
double objective_l1(const AnalysisOperator& op, const Matrix& x);

// S X^T with S_ij = sgn((W X)_ij) where |(W X)_ij| > tol::sign, and an
// independent uniform draw from [-1, 1] elsewhere (drawn in column-major
// order of W X).
Matrix subgradient(const AnalysisOperator& op, const Matrix& x, Rng& rng);

}  // namespace aol
