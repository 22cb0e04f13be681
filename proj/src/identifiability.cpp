#include "aol/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "aol/kernels.hpp"
#include "aol/matrix_io.hpp"
#include "aol/rng.hpp"
#include "json.hpp"

namespace aol {

namespace {

constexpr double kRankRatio = 1e-10;
constexpr double kKernelRelTol = 1e-12;
constexpr double kMinSampleNorm = 1e-12;
constexpr double kTangentTol = 1e-8;

// Orthonormal basis of ker(m): the trailing columns of Q in a pivoted QR of
// m^T. Eigen 3.4's BDCSVD can report spurious singular values here.
Matrix null_space(const Matrix& m) {
  Eigen::ColPivHouseholderQR<Matrix> qr(m.transpose());
  qr.setThreshold(static_cast<double>(std::max(m.rows(), m.cols())) * kKernelRelTol);
  const Index rank = qr.rank();
  const Matrix q = qr.householderQ();
  return q.rightCols(m.cols() - rank);
}

}  // namespace

// ---------------------------------------------------------------------------
// Tangent space
// ---------------------------------------------------------------------------

Matrix TangentSpace::combine(const Vector& coefficients) const {
  require_same_dim(dim(), coefficients.size(), "tangent coefficients");
  Matrix out = Matrix::Zero(base.rows(), base.cols());
  for (Index k = 0; k < dim(); ++k) out += coefficients(k) * basis[static_cast<std::size_t>(k)];
  return out;
}

double tangent_residual(const Matrix& w, const Matrix& delta) {
  require_same_dim(w.rows(), delta.rows(), "tangent direction rows");
  require_same_dim(w.cols(), delta.cols(), "tangent direction columns");
  const Matrix sym = delta.transpose() * w + w.transpose() * delta;
  const double rows = (w.cwiseProduct(delta).rowwise().sum()).cwiseAbs().maxCoeff();
  return std::max(sym.norm(), rows);
}

TangentSpace tangent_basis(const AnalysisOperator& op0) {
  const Matrix& w = op0.matrix();
  const Index a = w.rows();
  const Index n = w.cols();
  const Index sym_rows = n * (n + 1) / 2;
  Matrix c = Matrix::Zero(sym_rows + a, a * n);
  auto col = [a](Index k, Index m) { return k + m * a; };

  Index row = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i, ++row) {
      // (D^T W + W^T D)_ij = sum_k D_ki W_kj + W_ki D_kj
      for (Index k = 0; k < a; ++k) {
        c(row, col(k, i)) += w(k, j);
        c(row, col(k, j)) += w(k, i);
      }
    }
  }
  for (Index i = 0; i < a; ++i) {
    for (Index m = 0; m < n; ++m) c(sym_rows + i, col(i, m)) = w(i, m);
  }

  const Matrix kernel = null_space(c);
  TangentSpace space{op0, {}};
  space.basis.reserve(static_cast<std::size_t>(kernel.cols()));
  for (Index k = 0; k < kernel.cols(); ++k) {
    space.basis.emplace_back(Eigen::Map<const Matrix>(kernel.col(k).data(), a, n));
  }
  return space;
}

// ---------------------------------------------------------------------------
// Psi
// ---------------------------------------------------------------------------

PsiOperator build_psi(const AnalysisOperator& op0, const Matrix& x) {
  const Index a = op0.rows();
  const Index n = op0.cols();
  require_same_dim(n, x.rows(), "build_psi signal dimension");
  const Index l = x.cols();
  if (l < n) throw Error(ErrorCode::InvalidArgument, "build_psi needs l >= n");

  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  if (!(s(n - 1) >= kRankRatio * s(0))) {
    throw Error(ErrorCode::RankDeficientData, "training matrix is not of full rank n");
  }

  PsiOperator psi;
  psi.a_ = a;
  psi.n_ = n;
  psi.l_ = l;
  psi.u_ = svd.matrixU();
  psi.sigma_ = s;
  psi.v1_ = svd.matrixV().leftCols(n);
  psi.v0_ = svd.matrixV().rightCols(l - n);
  psi.z0_ = op0.matrix() * x;
  const Vector inv_sq = s.array().square().inverse().matrix();
  psi.q_ = psi.v1_ * (inv_sq.asDiagonal() * (psi.v1_.transpose() * psi.z0_.transpose()));
  psi.a_mat_ = psi.z0_ * psi.v1_;
  return psi;
}

Vector PsiOperator::apply(const Matrix& dz) const {
  require_same_dim(a_, dz.rows(), "Psi input rows");
  require_same_dim(l_, dz.cols(), "Psi input columns");
  Vector out(rows());

  const Matrix m = v1_.transpose() * dz.transpose() * a_mat_;
  const Matrix sym = m + m.transpose();
  out.head(n_ * n_) = Eigen::Map<const Vector>(sym.data(), n_ * n_);

  for (Index i = 0; i < a_; ++i) out(n_ * n_ + i) = dz.row(i).dot(q_.col(i));

  if (l_ > n_) {
    const Matrix k = dz * v0_;
    out.tail(a_ * (l_ - n_)) = Eigen::Map<const Vector>(k.data(), k.size());
  }
  return out;
}

const Matrix& PsiOperator::dense() const {
  if (dense_) return *dense_;
  Matrix psi = Matrix::Zero(rows(), cols());
  auto col = [this](Index k, Index r) { return k + r * a_; };

  // Symmetric block: row i + j n, coefficient of dz_kr is
  // V1_ri A_kj + V1_rj A_ki.
  for (Index r = 0; r < l_; ++r) {
    for (Index k = 0; k < a_; ++k) {
      const Index c = col(k, r);
      for (Index j = 0; j < n_; ++j) {
        for (Index i = 0; i < n_; ++i) {
          psi(i + j * n_, c) = v1_(r, i) * a_mat_(k, j) + v1_(r, j) * a_mat_(k, i);
        }
      }
    }
  }
  // Row-norm block: sum_r dz_ir Q_ri.
  for (Index i = 0; i < a_; ++i) {
    for (Index r = 0; r < l_; ++r) psi(n_ * n_ + i, col(i, r)) = q_(r, i);
  }
  // Row-space block: (dz V0)_im, row offset i + m a.
  const Index base = n_ * n_ + a_;
  for (Index m = 0; m < l_ - n_; ++m) {
    for (Index i = 0; i < a_; ++i) {
      for (Index r = 0; r < l_; ++r) psi(base + i + m * a_, col(i, r)) = v0_(r, m);
    }
  }
  dense_ = std::move(psi);
  return *dense_;
}

const Matrix& PsiOperator::kernel_basis() const {
  if (!kernel_) kernel_ = null_space(dense());
  return *kernel_;
}

std::vector<Matrix> sample_kernel(const PsiOperator& psi, Index count, std::uint64_t seed) {
  const Matrix& k = psi.kernel_basis();
  if (k.cols() == 0) throw Error(ErrorCode::TrivialKernel, "ker(Psi) is trivial");
  Rng rng = make_stream(seed, {stream::kernel});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(std::max<Index>(count, 0)));
  Vector g(k.rows());
  while (static_cast<Index>(out.size()) < count) {
    for (Index i = 0; i < g.size(); ++i) g(i) = normal(rng);
    Vector v = k * (k.transpose() * g);
    const double norm = v.norm();
    if (norm < kMinSampleNorm) continue;
    v /= norm;
    out.emplace_back(Eigen::Map<const Matrix>(v.data(), psi.atoms(), psi.samples()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Condition checks
// ---------------------------------------------------------------------------

namespace {

kernels::CosupportSums sums(const Matrix& z0, const Matrix& m, double zero_tol) {
  require_same_dim(z0.rows(), m.rows(), "perturbation rows");
  require_same_dim(z0.cols(), m.cols(), "perturbation columns");
  return kernels::cosupport_sums(flat(z0), flat(m), zero_tol);
}

ConditionCheck verdict(double margin) { return {margin > 0.0, margin}; }

ConditionCheck lemma3_from_codes(const Matrix& z0, const Matrix& dz, double zero_tol) {
  const auto s = sums(z0, dz, zero_tol);
  return verdict(s.on_cosupport - std::abs(s.sign_dot));
}

ConditionCheck theorem1_from_codes(const Matrix& z0, const Matrix& dz, double zero_tol) {
  const auto s = sums(z0, dz, zero_tol);
  return verdict(s.on_cosupport - s.off_cosupport);
}

struct LemmaTerms {
  kernels::CosupportSums sums;
  double trace;  // lambda tr(Sigma^T (X0 - Y))
};

LemmaTerms lemma_terms(const AnalysisOperator& op0, const Matrix& x0, const Matrix& y,
                       double lambda, const Matrix& delta, const Matrix& sigma, double zero_tol) {
  const Matrix& w = op0.matrix();
  require_same_dim(w.cols(), x0.rows(), "X0 rows");
  require_same_dim(x0.rows(), y.rows(), "Y rows");
  require_same_dim(x0.cols(), y.cols(), "Y columns");
  require_same_dim(x0.rows(), sigma.rows(), "Sigma rows");
  require_same_dim(x0.cols(), sigma.cols(), "Sigma columns");
  const double residual = tangent_residual(w, delta);
  if (residual > kTangentTol * std::max(1.0, delta.norm())) {
    throw Error(ErrorCode::NotInTangentSpace,
                "perturbation violates the tangent constraints by " + std::to_string(residual));
  }
  const Matrix z0 = w * x0;
  const Matrix m = delta * x0 + w * sigma;
  return {sums(z0, m, zero_tol), lambda * sigma.cwiseProduct(x0 - y).sum()};
}

}  // namespace

ConditionCheck check_lemma3(const AnalysisOperator& op0, const Matrix& x, const Matrix& dz,
                            double zero_tol) {
  return lemma3_from_codes(op0.matrix() * x, dz, zero_tol);
}

ConditionCheck check_theorem1(const AnalysisOperator& op0, const Matrix& x, const Matrix& dz,
                              double zero_tol) {
  return theorem1_from_codes(op0.matrix() * x, dz, zero_tol);
}

ConditionCheck check_lemma1(const AnalysisOperator& op0, const Matrix& x0, const Matrix& y,
                            double lambda, const Matrix& delta, const Matrix& sigma,
                            double zero_tol) {
  const LemmaTerms t = lemma_terms(op0, x0, y, lambda, delta, sigma, zero_tol);
  return verdict(t.sums.on_cosupport - std::abs(t.sums.sign_dot + t.trace));
}

ConditionCheck check_lemma2(const AnalysisOperator& op0, const Matrix& x0, const Matrix& y,
                            double lambda, const Matrix& delta, const Matrix& sigma,
                            double zero_tol) {
  const LemmaTerms t = lemma_terms(op0, x0, y, lambda, delta, sigma, zero_tol);
  return verdict(t.sums.on_cosupport - t.sums.off_cosupport - std::abs(t.trace));
}

double ConditionReport::lemma3_fraction() const {
  return n_samples == 0 ? 0.0
                        : static_cast<double>(n_satisfied_lemma3) / static_cast<double>(n_samples);
}

double ConditionReport::theorem1_fraction() const {
  return n_samples == 0
             ? 0.0
             : static_cast<double>(n_satisfied_theorem1) / static_cast<double>(n_samples);
}

ConditionReport identifiability_fraction(const AnalysisOperator& op0, const Matrix& x, Index count,
                                         std::uint64_t seed, double zero_tol) {
  const PsiOperator psi = build_psi(op0, x);
  const std::vector<Matrix> samples = sample_kernel(psi, count, seed);
  const Matrix& z0 = psi.z0();

  ConditionReport report;
  report.n_samples = static_cast<Index>(samples.size());
  report.kernel_dim = psi.kernel_dim();
  report.cosupport_size = static_cast<Index>(kernels::count_small(flat(z0), zero_tol));
  report.lemma3_margins.reserve(samples.size());
  report.theorem1_margins.reserve(samples.size());
  for (const Matrix& dz : samples) {
    const ConditionCheck l3 = lemma3_from_codes(z0, dz, zero_tol);
    const ConditionCheck t1 = theorem1_from_codes(z0, dz, zero_tol);
    report.lemma3_margins.push_back(l3.margin);
    report.theorem1_margins.push_back(t1.margin);
    report.n_satisfied_lemma3 += l3.satisfied ? 1 : 0;
    report.n_satisfied_theorem1 += t1.satisfied ? 1 : 0;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void write_report_csv(std::ostream& os, const ConditionReport& report) {
  os << "sample_id,lemma3_margin,theorem1_margin,lemma3_satisfied,theorem1_satisfied\n";
  for (std::size_t i = 0; i < report.lemma3_margins.size(); ++i) {
    const double l3 = report.lemma3_margins[i];
    const double t1 = report.theorem1_margins[i];
    os << i << ',' << format_real(l3) << ',' << format_real(t1) << ',' << (l3 > 0.0 ? 1 : 0)
       << ',' << (t1 > 0.0 ? 1 : 0) << '\n';
  }
}

std::string report_summary_json(const ConditionReport& report) {
  nlohmann::ordered_json j;
  j["n_samples"] = report.n_samples;
  j["n_satisfied_lemma3"] = report.n_satisfied_lemma3;
  j["n_satisfied_theorem1"] = report.n_satisfied_theorem1;
  j["lemma3_fraction"] = report.lemma3_fraction();
  j["theorem1_fraction"] = report.theorem1_fraction();
  j["cosupport_size"] = report.cosupport_size;
  j["kernel_dim"] = report.kernel_dim;
  return j.dump(2);
}

}  // namespace aol
