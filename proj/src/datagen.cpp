#include "aol/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "aol/operators.hpp"
#include "aol/rng.hpp"

namespace aol {

namespace {

constexpr int kMaxAlternations = 20000;
constexpr double kUntfTol = 1e-8;
constexpr int kUntfRetries = 5;
constexpr int kSelectionRetries = 100;
constexpr double kCosupportTol = 1e-10;

Matrix gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (a < n) throw Error(ErrorCode::InvalidArgument, "synthetic spec needs a >= n");
  if (q < 0 || q >= n) throw Error(ErrorCode::InvalidArgument, "synthetic spec needs 0 <= q < n");
  if (l < 1) throw Error(ErrorCode::InvalidArgument, "synthetic spec needs l >= 1");
  if (!(gamma_perturb >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "perturbation gamma must be >= 0");
  }
}

AnalysisOperator random_untf(Index a, Index n, std::uint64_t seed) {
  if (a < n || n < 1) throw Error(ErrorCode::InvalidArgument, "random_untf needs a >= n >= 1");
  double frame = 0.0;
  double row = 0.0;
  for (int attempt = 0; attempt < kUntfRetries; ++attempt) {
    Rng rng = make_stream(seed, {static_cast<std::uint64_t>(attempt)});
    const Matrix draw = gaussian(a, n, rng);
    UntfResult r =
        untf_project(AnalysisOperator(draw), Constraint::untf(), kMaxAlternations, kUntfTol, rng);
    if (r.converged) return std::move(r.op);
    frame = r.frame_residual;
    row = r.row_residual;
  }
  throw NotConvergedError("random_untf: alternating projections did not reach 1e-8", frame, row);
}

SignalMatrix sample_cosparse(const AnalysisOperator& op, Index q, Index count, std::uint64_t seed) {
  const Index a = op.rows();
  const Index n = op.cols();
  if (q < 0 || q >= n) throw Error(ErrorCode::InvalidArgument, "sample_cosparse needs 0 <= q < n");
  if (q > a) throw Error(ErrorCode::InvalidArgument, "sample_cosparse needs q <= a");
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "sample_cosparse needs count >= 1");

  const Matrix& w = op.matrix();
  Matrix out(n, count);
  std::vector<Index> rows(static_cast<std::size_t>(a));
  std::iota(rows.begin(), rows.end(), Index{0});
  std::vector<Index> chosen(static_cast<std::size_t>(q));
  std::normal_distribution<double> normal(0.0, 1.0);

  for (Index j = 0; j < count; ++j) {
    Rng rng = make_stream(seed, {stream::data, static_cast<std::uint64_t>(j)});
    bool accepted = false;
    for (int attempt = 0; attempt < kSelectionRetries && !accepted; ++attempt) {
      std::sample(rows.begin(), rows.end(), chosen.begin(), q, rng);
      Vector x(n);
      for (Index i = 0; i < n; ++i) x(i) = normal(rng);
      if (q == 0) {
        out.col(j) = x;
        accepted = true;
        break;
      }
      Matrix selected(q, n);
      for (Index r = 0; r < q; ++r) selected.row(r) = w.row(chosen[static_cast<std::size_t>(r)]);
      Eigen::ColPivHouseholderQR<Matrix> qr(selected.transpose());
      if (qr.rank() < q) continue;
      const Matrix basis = qr.householderQ() * Matrix::Identity(n, q);
      // Two passes of the complement projection keep the residual at rounding level.
      x -= basis * (basis.transpose() * x);
      x -= basis * (basis.transpose() * x);
      if ((selected * x).cwiseAbs().maxCoeff() > kCosupportTol) continue;
      out.col(j) = x;
      accepted = true;
    }
    if (!accepted) {
      throw Error(ErrorCode::DegenerateSelection,
                  "no full-rank row selection for column " + std::to_string(j));
    }
  }
  return SignalMatrix(std::move(out), SignalMatrix::Role::Clean);
}

AnalysisOperator perturb_operator(const AnalysisOperator& op0, double gamma, std::uint64_t seed) {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbation gamma must be >= 0");
  if (std::isinf(gamma)) {
    return random_untf(op0.rows(), op0.cols(), derive_seed(seed, {stream::perturb, 1}));
  }
  Rng rng = make_stream(seed, {stream::perturb});
  Matrix noise = gaussian(op0.rows(), op0.cols(), rng);
  noise /= noise.norm();
  const AnalysisOperator start = op0.with_matrix(op0.matrix() + gamma * noise);
  UntfResult r = untf_project(start, Constraint::untf(), kMaxAlternations, kUntfTol, rng);
  if (!r.converged) {
    throw NotConvergedError("perturb_operator: alternating projections did not reach 1e-8",
                            r.frame_residual, r.row_residual);
  }
  return std::move(r.op);
}

}  // namespace aol
