#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "aol/types.hpp"

namespace aol {

// Grayscale image, nominal range [0, 255]; values are not clamped.
class GrayImage {
 public:
  GrayImage() = default;
  // Throws InvalidArgument on non-finite pixels.
  explicit GrayImage(Matrix pixels);

  const Matrix& pixels() const { return pixels_; }
  Index height() const { return pixels_.rows(); }
  Index width() const { return pixels_.cols(); }

 private:
  Matrix pixels_;
};

// p x p patches, each vectorized column-major (pixel (r, c) -> r + c p).
struct PatchSet {
  Index p = 0;
  SignalMatrix patches;
  std::vector<std::pair<Index, Index>> offsets;  // (row, column) of the top-left pixel
  Vector means;                                  // per patch; empty unless mean_removed
  bool mean_removed = false;
  Index image_height = 0;
  Index image_width = 0;

  Index count() const { return patches.count(); }
  // Patch columns with the stored means added back.
  Matrix restored() const;
};

// count = nullopt enumerates every overlapping offset in raster order
// (row-major over offsets); otherwise count offsets are drawn uniformly with
// replacement from the seed.
PatchSet extract_patches(const GrayImage& img, Index p, std::optional<Index> count,
                         bool mean_remove, std::uint64_t seed);

// Random patches that all contain an edge (are not constant), except one
// constant patch when the image has any: count - 1 offsets drawn uniformly
// with replacement from the non-constant ones, then the first constant
// offset in raster order. Throws InvalidArgument when the image has no edges.
PatchSet extract_edge_patches(const GrayImage& img, Index p, Index count, bool mean_remove,
                              std::uint64_t seed);

// Vertical then horizontal first differences over interior adjacent pixel
// pairs, 2 p (p - 1) rows. Not a tight frame; flagged NonTight.
AnalysisOperator fd_operator(Index p);

// Orthonormal 2-D Haar pyramid stacked with its copy on the grid cyclically
// shifted by one pixel along both axes, scaled by 1/sqrt(2): 2 p^2 rows,
// tight, with uniform row norms. p must be a power of two.
AnalysisOperator haar_operator(Index p);

// Solves min_x ||W x||_1 + lambda/2 ||y - x||^2 for every patch with the DRS
// signal update (at most iters iterations, general inverse allowed for
// non-tight operators). A patch whose objective would increase keeps its
// input value. Means are added back; the result has mean_removed = false.
PatchSet denoise_patches(const PatchSet& y, const AnalysisOperator& op, double lambda,
                         double gamma, int iters);

// Per-pixel mean of the covering patch estimates (means included). Throws
// CoverageGap when some pixel is not covered.
GrayImage reconstruct_overlap(const PatchSet& patches, Index height, Index width);

inline constexpr double kIdenticalPsnr = std::numeric_limits<double>::infinity();

// 10 log10(peak^2 / MSE); kIdenticalPsnr for identical images.
double psnr(const GrayImage& ref, const GrayImage& test, double peak = 255.0);

// #{i : |(W x)_i| <= zero_tol}
Index cosparsity(const AnalysisOperator& op, const Vector& x, double zero_tol = 0.01);
// Column average of cosparsity.
double mean_cosparsity(const AnalysisOperator& op, const Matrix& x, double zero_tol = 0.01);

// Fraction of reference rows matched, one-to-one and closest pair first, by a
// learned row within threshold in l2 distance up to sign.
double row_recovery_rate(const AnalysisOperator& learned, const AnalysisOperator& reference,
                         double threshold = 0.031622776601683794);

// Binary 8-bit PGM (P5). Writing rounds and clamps to [0, 255].
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

// Modified Shepp-Logan phantom on a size x size grid over [-1, 1]^2, scaled
// to [0, 255].
GrayImage shepp_logan(Index size);

}  // namespace aol
