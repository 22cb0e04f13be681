#include "aol/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "aol/kernels.hpp"
#include "aol/learning.hpp"
#include "aol/rng.hpp"

namespace aol {

GrayImage::GrayImage(Matrix pixels) : pixels_(std::move(pixels)) {
  if (!pixels_.allFinite()) throw Error(ErrorCode::InvalidArgument, "image has non-finite pixels");
}

Matrix PatchSet::restored() const {
  Matrix out = patches.matrix();
  if (mean_removed) out.rowwise() += means.transpose();
  return out;
}

// ---------------------------------------------------------------------------
// Patches
// ---------------------------------------------------------------------------

PatchSet extract_patches(const GrayImage& img, Index p, std::optional<Index> count,
                         bool mean_remove, std::uint64_t seed) {
  const Index h = img.height();
  const Index w = img.width();
  if (p < 1 || p > std::min(h, w)) {
    throw Error(ErrorCode::InvalidArgument, "patch size exceeds the image");
  }
  if (count && *count < 1) throw Error(ErrorCode::InvalidArgument, "patch count must be >= 1");

  PatchSet set;
  set.p = p;
  set.image_height = h;
  set.image_width = w;
  set.mean_removed = mean_remove;
  const Index rows = h - p + 1;
  const Index cols = w - p + 1;
  if (count) {
    Rng rng = make_stream(seed, {stream::patches});
    std::uniform_int_distribution<Index> pick(0, rows * cols - 1);
    set.offsets.reserve(static_cast<std::size_t>(*count));
    for (Index k = 0; k < *count; ++k) {
      const Index o = pick(rng);
      set.offsets.emplace_back(o / cols, o % cols);
    }
  } else {
    set.offsets.reserve(static_cast<std::size_t>(rows * cols));
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) set.offsets.emplace_back(r, c);
  }

  const Index n = static_cast<Index>(set.offsets.size());
  Matrix data(p * p, n);
  for (Index k = 0; k < n; ++k) {
    const auto [r, c] = set.offsets[static_cast<std::size_t>(k)];
    const Matrix block = img.pixels().block(r, c, p, p);
    data.col(k) = Eigen::Map<const Vector>(block.data(), p * p);
  }
  if (mean_remove) {
    set.means = data.colwise().mean().transpose();
    data.rowwise() -= set.means.transpose();
  }
  set.patches = SignalMatrix(std::move(data), SignalMatrix::Role::Observed);
  return set;
}

PatchSet extract_edge_patches(const GrayImage& img, Index p, Index count, bool mean_remove,
                              std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "patch count must be >= 1");
  const PatchSet all = extract_patches(img, p, std::nullopt, false, 0);
  const Matrix& data = all.patches.matrix();
  std::vector<Index> edges;
  std::optional<Index> flat_patch;
  for (Index k = 0; k < data.cols(); ++k) {
    if (data.col(k).maxCoeff() > data.col(k).minCoeff()) {
      edges.push_back(k);
    } else if (!flat_patch) {
      flat_patch = k;
    }
  }
  if (edges.empty()) throw Error(ErrorCode::InvalidArgument, "image has no non-constant patch");

  std::vector<Index> chosen;
  Rng rng = make_stream(seed, {stream::patches});
  std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
  const Index random_count = flat_patch ? count - 1 : count;
  for (Index k = 0; k < random_count; ++k) chosen.push_back(edges[pick(rng)]);
  if (flat_patch) chosen.push_back(*flat_patch);

  PatchSet set;
  set.p = p;
  set.image_height = img.height();
  set.image_width = img.width();
  set.mean_removed = mean_remove;
  Matrix out(p * p, static_cast<Index>(chosen.size()));
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    out.col(static_cast<Index>(k)) = data.col(chosen[k]);
    set.offsets.push_back(all.offsets[static_cast<std::size_t>(chosen[k])]);
  }
  if (mean_remove) {
    set.means = out.colwise().mean().transpose();
    out.rowwise() -= set.means.transpose();
  }
  set.patches = SignalMatrix(std::move(out), SignalMatrix::Role::Observed);
  return set;
}

GrayImage reconstruct_overlap(const PatchSet& patches, Index height, Index width) {
  const Index p = patches.p;
  Matrix sum = Matrix::Zero(height, width);
  Matrix cover = Matrix::Zero(height, width);
  const Matrix values = patches.restored();
  for (Index k = 0; k < patches.count(); ++k) {
    const auto [r, c] = patches.offsets[static_cast<std::size_t>(k)];
    if (r < 0 || c < 0 || r + p > height || c + p > width) {
      throw Error(ErrorCode::DimensionMismatch, "patch offset outside the image");
    }
    sum.block(r, c, p, p) += Eigen::Map<const Matrix>(values.col(k).data(), p, p);
    cover.block(r, c, p, p).array() += 1.0;
  }
  if ((cover.array() == 0.0).any()) {
    throw Error(ErrorCode::CoverageGap, "some pixels are not covered by any patch");
  }
  return GrayImage(sum.cwiseQuotient(cover));
}

// ---------------------------------------------------------------------------
// Reference operators
// ---------------------------------------------------------------------------

AnalysisOperator fd_operator(Index p) {
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "fd_operator needs p >= 2");
  const Index n = p * p;
  Matrix w = Matrix::Zero(2 * p * (p - 1), n);
  auto px = [p](Index r, Index c) { return r + c * p; };
  Index row = 0;
  for (Index c = 0; c < p; ++c) {
    for (Index r = 0; r + 1 < p; ++r, ++row) {
      w(row, px(r, c)) = -1.0;
      w(row, px(r + 1, c)) = 1.0;
    }
  }
  for (Index c = 0; c + 1 < p; ++c) {
    for (Index r = 0; r < p; ++r, ++row) {
      w(row, px(r, c)) = -1.0;
      w(row, px(r, c + 1)) = 1.0;
    }
  }
  return AnalysisOperator(std::move(w), std::sqrt(2.0), AnalysisOperator::Kind::NonTight);
}

namespace {

// One orthonormal Haar analysis step on the first len entries of v.
void haar_step(double* v, Index len, Index stride, std::vector<double>& tmp) {
  const double s = 1.0 / std::sqrt(2.0);
  const Index half = len / 2;
  tmp.resize(static_cast<std::size_t>(len));
  for (Index i = 0; i < half; ++i) {
    const double x0 = v[(2 * i) * stride];
    const double x1 = v[(2 * i + 1) * stride];
    tmp[static_cast<std::size_t>(i)] = s * (x0 + x1);
    tmp[static_cast<std::size_t>(half + i)] = s * (x0 - x1);
  }
  for (Index i = 0; i < len; ++i) v[i * stride] = tmp[static_cast<std::size_t>(i)];
}

// Nonstandard (pyramid) 2-D Haar transform of a p x p block, in place.
void haar2d(Matrix& block) {
  std::vector<double> tmp;
  for (Index len = block.rows(); len > 1; len /= 2) {
    for (Index c = 0; c < len; ++c) haar_step(&block(0, c), len, 1, tmp);
    for (Index r = 0; r < len; ++r) haar_step(&block(r, 0), len, block.rows(), tmp);
  }
}

}  // namespace

AnalysisOperator haar_operator(Index p) {
  if (p < 1 || (p & (p - 1)) != 0) {
    throw Error(ErrorCode::InvalidArgument, "haar_operator needs p to be a power of two");
  }
  const Index n = p * p;
  Matrix basis(n, n);
  for (Index j = 0; j < n; ++j) {
    Matrix block = Matrix::Zero(p, p);
    block(j % p, j / p) = 1.0;
    haar2d(block);
    basis.col(j) = Eigen::Map<const Vector>(block.data(), n);
  }
  // (S x)(r, c) = x((r + 1) mod p, (c + 1) mod p)
  Matrix shift = Matrix::Zero(n, n);
  for (Index c = 0; c < p; ++c)
    for (Index r = 0; r < p; ++r) shift(r + c * p, (r + 1) % p + ((c + 1) % p) * p) = 1.0;

  Matrix w(2 * n, n);
  w.topRows(n) = basis;
  w.bottomRows(n) = basis * shift;
  w /= std::sqrt(2.0);
  return AnalysisOperator(std::move(w));
}

// ---------------------------------------------------------------------------
// Denoising
// ---------------------------------------------------------------------------

PatchSet denoise_patches(const PatchSet& y, const AnalysisOperator& op, double lambda,
                         double gamma, int iters) {
  require_same_dim(op.cols(), y.patches.dim(), "denoise patch length");
  LearnConfig cfg;
  cfg.lambda = lambda;
  cfg.gamma = gamma;
  cfg.k_max_drs = iters;
  cfg.allow_general_inverse = true;

  const Matrix& obs = y.patches.matrix();
  SignalUpdateResult r = signal_update(y.patches, op, y.patches, cfg);
  Matrix x = r.signals.matrix();

  const Matrix& w = op.matrix();
  const Matrix zy = w * obs;
  const Matrix zx = w * x;
  for (Index j = 0; j < x.cols(); ++j) {
    const double f_in = kernels::abs_sum({zy.col(j).data(), static_cast<std::size_t>(zy.rows())});
    const double f_out = kernels::abs_sum({zx.col(j).data(), static_cast<std::size_t>(zx.rows())}) +
                         0.5 * lambda * (obs.col(j) - x.col(j)).squaredNorm();
    if (f_out > f_in) x.col(j) = obs.col(j);
  }

  PatchSet out = y;
  if (y.mean_removed) x.rowwise() += y.means.transpose();
  out.patches = SignalMatrix(std::move(x), SignalMatrix::Role::Clean);
  out.means = Vector();
  out.mean_removed = false;
  return out;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double psnr(const GrayImage& ref, const GrayImage& test, double peak) {
  require_same_dim(ref.height(), test.height(), "psnr image height");
  require_same_dim(ref.width(), test.width(), "psnr image width");
  const double mse = (ref.pixels() - test.pixels()).squaredNorm() /
                     static_cast<double>(ref.pixels().size());
  if (mse == 0.0) return kIdenticalPsnr;
  return 10.0 * std::log10(peak * peak / mse);
}

Index cosparsity(const AnalysisOperator& op, const Vector& x, double zero_tol) {
  require_same_dim(op.cols(), x.size(), "cosparsity signal dimension");
  const Vector z = op.matrix() * x;
  return static_cast<Index>(
      kernels::count_small({z.data(), static_cast<std::size_t>(z.size())}, zero_tol));
}

double mean_cosparsity(const AnalysisOperator& op, const Matrix& x, double zero_tol) {
  require_same_dim(op.cols(), x.rows(), "cosparsity signal dimension");
  if (x.cols() == 0) return 0.0;
  const Matrix z = op.matrix() * x;
  const auto zeros = kernels::count_small(flat(z), zero_tol);
  return static_cast<double>(zeros) / static_cast<double>(x.cols());
}

double row_recovery_rate(const AnalysisOperator& learned, const AnalysisOperator& reference,
                         double threshold) {
  require_same_dim(reference.rows(), learned.rows(), "row recovery operator rows");
  require_same_dim(reference.cols(), learned.cols(), "row recovery operator columns");
  const Matrix& l = learned.matrix();
  const Matrix& r = reference.matrix();
  const Index a = r.rows();

  std::vector<std::tuple<double, Index, Index>> candidates;
  for (Index i = 0; i < a; ++i) {
    for (Index j = 0; j < a; ++j) {
      const double d = std::min((l.row(i) - r.row(j)).norm(), (l.row(i) + r.row(j)).norm());
      if (d <= threshold) candidates.emplace_back(d, j, i);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<bool> used_learned(static_cast<std::size_t>(a), false);
  std::vector<bool> used_reference(static_cast<std::size_t>(a), false);
  Index matched = 0;
  for (const auto& [d, j, i] : candidates) {
    if (used_reference[static_cast<std::size_t>(j)] || used_learned[static_cast<std::size_t>(i)])
      continue;
    used_reference[static_cast<std::size_t>(j)] = true;
    used_learned[static_cast<std::size_t>(i)] = true;
    ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(a);
}

}  // namespace aol
