#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aol/types.hpp"

namespace aol {

// Orthonormal basis of the tangent space of the UNTF set at a base operator:
// all a x n matrices D with D^T W + W^T D = 0 and <w_i, d_i> = 0 for each row.
struct TangentSpace {
  AnalysisOperator base;
  std::vector<Matrix> basis;  // Frobenius-orthonormal, each a x n

  Index dim() const { return static_cast<Index>(basis.size()); }
  // Linear combination sum_k c_k basis[k].
  Matrix combine(const Vector& coefficients) const;
};

// Largest violation of the two tangent constraints for D at W:
// max(||D^T W + W^T D||_F, max_i |<w_i, d_i>|).
double tangent_residual(const Matrix& w, const Matrix& delta);

// Null space of the stacked constraint matrix (symmetric part as upper
// triangle, then one row per atom) from a pivoted QR. Dense in a*n columns;
// meant for moderate operator sizes.
TangentSpace tangent_basis(const AnalysisOperator& op0);

// The linear map dz -> (symmetric tight-frame block, row-norm block,
// row-space block) whose kernel holds every dz = D X with D tangent at W.
// vect(dz) stacks the columns of the a x l matrix dz.
//
// The dense matrix and the kernel basis are built on first use and cached;
// a PsiOperator is therefore not safe to share across threads until both
// have been requested once.
class PsiOperator {
 public:
  Index atoms() const { return a_; }
  Index dim() const { return n_; }
  Index samples() const { return l_; }
  // n^2 + a + a (l - n)
  Index rows() const { return n_ * n_ + a_ + a_ * (l_ - n_); }
  // a l
  Index cols() const { return a_ * l_; }

  const Matrix& u() const { return u_; }
  const Vector& singular_values() const { return sigma_; }
  const Matrix& v1() const { return v1_; }
  const Matrix& v0() const { return v0_; }
  const Matrix& q() const { return q_; }
  const Matrix& a_matrix() const { return a_mat_; }
  const Matrix& z0() const { return z0_; }

  // Matrix-free product Psi vect(dz) for an a x l matrix dz.
  Vector apply(const Matrix& dz) const;
  // Explicit Psi, rows() x cols().
  const Matrix& dense() const;
  // Orthonormal basis of ker(Psi), cols() x kernel_dim(), from a pivoted QR
  // of the dense transpose; pivots below max(rows, cols) * 1e-12 times the
  // largest count as zero.
  const Matrix& kernel_basis() const;
  Index kernel_dim() const { return kernel_basis().cols(); }

 private:
  friend PsiOperator build_psi(const AnalysisOperator& op0, const Matrix& x);

  Index a_ = 0;
  Index n_ = 0;
  Index l_ = 0;
  Matrix u_;
  Vector sigma_;
  Matrix v1_;
  Matrix v0_;
  Matrix q_;      // V1 S^-2 V1^T Z0^T, l x a
  Matrix a_mat_;  // Z0 V1, a x n
  Matrix z0_;     // W X, a x l
  mutable std::optional<Matrix> dense_;
  mutable std::optional<Matrix> kernel_;
};

// Throws RankDeficientData when sigma_n(X) / sigma_1(X) < 1e-10 and
// InvalidArgument when l < n.
PsiOperator build_psi(const AnalysisOperator& op0, const Matrix& x);

// count unit-Frobenius a x l samples from ker(Psi): Gaussian vectors
// projected on the kernel basis. Throws TrivialKernel for ker(Psi) = {0}.
std::vector<Matrix> sample_kernel(const PsiOperator& psi, Index count, std::uint64_t seed);

struct ConditionCheck {
  bool satisfied = false;
  double margin = 0.0;  // right-hand side minus left-hand side; satisfied iff > 0
};

// Cosupport Lambda-bar = {(i, j) : |(W X)_ij| <= zero_tol}; sgn is 0 there.
// margin = ||dz on Lambda-bar||_1 - |<sgn(W X), dz>|
ConditionCheck check_lemma3(const AnalysisOperator& op0, const Matrix& x, const Matrix& dz,
                            double zero_tol);
// margin = ||dz on Lambda-bar||_1 - ||dz off Lambda-bar||_1
ConditionCheck check_theorem1(const AnalysisOperator& op0, const Matrix& x, const Matrix& dz,
                              double zero_tol);

// With M = D X0 + W Sigma and E = X0 - Y:
// margin = ||M on Lambda-bar||_1 - |<M, sgn(W X0)> + lambda tr(Sigma^T E)|
// Throws NotInTangentSpace when D violates the tangent constraints by more
// than 1e-8 max(1, ||D||_F).
ConditionCheck check_lemma1(const AnalysisOperator& op0, const Matrix& x0, const Matrix& y,
                            double lambda, const Matrix& delta, const Matrix& sigma,
                            double zero_tol);
// margin = ||M on Lambda-bar||_1 - ||M off Lambda-bar||_1 - lambda |tr(Sigma^T E)|
ConditionCheck check_lemma2(const AnalysisOperator& op0, const Matrix& x0, const Matrix& y,
                            double lambda, const Matrix& delta, const Matrix& sigma,
                            double zero_tol);

struct ConditionReport {
  Index n_samples = 0;
  Index n_satisfied_lemma3 = 0;
  Index n_satisfied_theorem1 = 0;
  std::vector<double> lemma3_margins;
  std::vector<double> theorem1_margins;
  Index cosupport_size = 0;  // |Lambda-bar| of W X
  Index kernel_dim = 0;

  double lemma3_fraction() const;
  double theorem1_fraction() const;
};

// build_psi, sample_kernel(count, seed), then both checks on every sample.
ConditionReport identifiability_fraction(const AnalysisOperator& op0, const Matrix& x, Index count,
                                         std::uint64_t seed, double zero_tol);

// One row per sample:
// sample_id,lemma3_margin,theorem1_margin,lemma3_satisfied,theorem1_satisfied
void write_report_csv(std::ostream& os, const ConditionReport& report);
// Counts, fractions and sizes as a JSON object.
std::string report_summary_json(const ConditionReport& report);

}  // namespace aol
