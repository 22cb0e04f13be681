#include <cmath>
#include <filesystem>
#include <fstream>

#include "aol/datagen.hpp"
#include "aol/imaging.hpp"
#include "aol/learning.hpp"
#include "aol/operators.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aol;
using aol::test::gaussian;

namespace {

GrayImage ramp(Index h, Index w) {
  Matrix m(h, w);
  for (Index c = 0; c < w; ++c)
    for (Index r = 0; r < h; ++r) m(r, c) = static_cast<double>(r * w + c);
  return GrayImage(m);
}

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "aol_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("dense patch extraction") {
  const GrayImage img = ramp(5, 7);
  const PatchSet set = extract_patches(img, 3, std::nullopt, false, 0);
  CHECK(set.count() == 3 * 5);
  CHECK(set.offsets.front() == std::pair<Index, Index>{0, 0});
  CHECK(set.offsets[1] == std::pair<Index, Index>{0, 1});
  // column-major inside the patch: (r, c) -> r + 3 c
  const Vector& first = set.patches.matrix().col(1);
  CHECK(first(0) == 1.0);
  CHECK(first(1) == 8.0);
  CHECK(first(3) == 2.0);

  const PatchSet centered = extract_patches(img, 3, std::nullopt, true, 0);
  CHECK(centered.patches.matrix().colwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((centered.restored() - set.patches.matrix()).norm() <= 1e-12);

  CHECK_THROWS_AS(extract_patches(img, 6, std::nullopt, false, 0), Error);
}

TEST_CASE("random patches are seeded") {
  const GrayImage img = ramp(20, 20);
  const PatchSet a = extract_patches(img, 4, 50, false, 7);
  const PatchSet b = extract_patches(img, 4, 50, false, 7);
  CHECK(a.offsets == b.offsets);
  CHECK(a.offsets != extract_patches(img, 4, 50, false, 8).offsets);
}

TEST_CASE("edge patches") {
  Matrix m = Matrix::Zero(16, 16);
  m.rightCols(4).setConstant(100.0);
  const GrayImage img(m);
  const PatchSet set = extract_edge_patches(img, 4, 40, false, 3);
  REQUIRE(set.count() == 40);
  const Matrix& x = set.patches.matrix();
  for (Index k = 0; k + 1 < x.cols(); ++k) CHECK(x.col(k).maxCoeff() > x.col(k).minCoeff());
  CHECK(x.col(39).maxCoeff() == x.col(39).minCoeff());
  CHECK(set.offsets.back() == std::pair<Index, Index>{0, 0});

  CHECK_THROWS_AS(extract_edge_patches(GrayImage(Matrix::Constant(8, 8, 3.0)), 4, 5, false, 0),
                  Error);
}

TEST_CASE("overlap reconstruction") {
  SUBCASE("untouched patches give the image back") {
    const GrayImage img(gaussian(9, 11, 1));
    const PatchSet set = extract_patches(img, 4, std::nullopt, true, 0);
    CHECK((reconstruct_overlap(set, 9, 11).pixels() - img.pixels()).norm() <= 1e-12);
  }
  SUBCASE("checkerboard accumulator") {
    // Patch k filled with the constant k: each pixel averages the indices of
    // the offsets covering it.
    const Index h = 5, w = 6, p = 2;
    PatchSet set = extract_patches(GrayImage(Matrix::Zero(h, w)), p, std::nullopt, false, 0);
    Matrix values(p * p, set.count());
    for (Index k = 0; k < set.count(); ++k) values.col(k).setConstant(static_cast<double>(k));
    set.patches = SignalMatrix(values);
    const Matrix out = reconstruct_overlap(set, h, w).pixels();
    for (Index r = 0; r < h; ++r) {
      for (Index c = 0; c < w; ++c) {
        double sum = 0.0;
        int cover = 0;
        for (Index k = 0; k < set.count(); ++k) {
          const auto [r0, c0] = set.offsets[static_cast<std::size_t>(k)];
          if (r >= r0 && r < r0 + p && c >= c0 && c < c0 + p) {
            sum += static_cast<double>(k);
            ++cover;
          }
        }
        CHECK(out(r, c) == doctest::Approx(sum / cover));
      }
    }
  }
  SUBCASE("uncovered pixels") {
    const PatchSet set = extract_patches(ramp(10, 10), 3, 1, false, 0);
    CHECK_THROWS_AS(reconstruct_overlap(set, 10, 10), Error);
  }
}

TEST_CASE("finite-difference operator") {
  const AnalysisOperator fd2 = fd_operator(2);
  Matrix expected(4, 4);
  expected << -1, 1, 0, 0,  //
      0, 0, -1, 1,          //
      -1, 0, 1, 0,          //
      0, -1, 0, 1;
  CHECK(fd2.matrix() == expected);
  CHECK(fd2.flagged_non_tight());

  const AnalysisOperator fd8 = fd_operator(8);
  CHECK(fd8.rows() == 112);
  CHECK(fd8.cols() == 64);
  CHECK((fd8.matrix() * Vector::Ones(64)).norm() == 0.0);

  // A vertical step between columns 3 and 4 excites the 8 horizontal
  // differences across it and nothing else.
  Matrix step = Matrix::Zero(8, 8);
  step.rightCols(4).setOnes();
  const Vector z = fd8.matrix() * Eigen::Map<const Vector>(step.data(), 64);
  CHECK((z.array() != 0.0).count() == 8);
  CHECK(z.cwiseAbs().sum() == 8.0);
  CHECK(cosparsity(fd8, Eigen::Map<const Vector>(step.data(), 64)) == 104);
}

TEST_CASE("Haar operator") {
  const AnalysisOperator h = haar_operator(8);
  CHECK(h.rows() == 128);
  CHECK(h.cols() == 64);
  CHECK((h.matrix().transpose() * h.matrix() - Matrix::Identity(64, 64)).norm() <= 1e-10);
  CHECK(row_residual(h.matrix(), std::sqrt(0.5)) <= 1e-10);
  CHECK(cosparsity(h, Vector::Ones(64), 1e-10) == 126);
  CHECK_THROWS_AS(haar_operator(6), Error);
}

TEST_CASE("patch denoising") {
  const GrayImage img = shepp_logan(32);
  Matrix noisy = img.pixels() + 10.0 * gaussian(32, 32, 5);
  const PatchSet y = extract_patches(GrayImage(noisy), 4, std::nullopt, true, 0);

  SUBCASE("huge lambda leaves the patches alone") {
    const PatchSet x = denoise_patches(y, haar_operator(4), 1e8, 0.5, 200);
    CHECK((x.patches.matrix() - y.restored()).cwiseAbs().maxCoeff() <= 1e-4);
  }
  SUBCASE("objective does not increase on any patch") {
    for (const AnalysisOperator& op : {haar_operator(4), fd_operator(4)}) {
      const PatchSet x = denoise_patches(y, op, 0.1, 0.5, 100);
      Matrix xc = x.patches.matrix();
      xc.rowwise() -= y.means.transpose();
      const Matrix& obs = y.patches.matrix();
      for (Index j = 0; j < obs.cols(); ++j) {
        const double before = (op.matrix() * obs.col(j)).cwiseAbs().sum();
        const double after = (op.matrix() * xc.col(j)).cwiseAbs().sum() +
                             0.05 * (obs.col(j) - xc.col(j)).squaredNorm();
        CHECK(after <= before + 1e-9 * (1.0 + before));
      }
      CHECK(psnr(img, reconstruct_overlap(x, 32, 32)) > psnr(img, GrayImage(noisy)));
    }
  }
}

TEST_CASE("psnr") {
  const GrayImage zero(Matrix::Zero(4, 4));
  CHECK(psnr(zero, zero) == kIdenticalPsnr);
  CHECK(psnr(zero, GrayImage(Matrix::Constant(4, 4, 255.0))) == doctest::Approx(0.0));
  CHECK(psnr(zero, GrayImage(Matrix::Constant(4, 4, 1.0))) == doctest::Approx(48.1308).epsilon(1e-5));
  CHECK_THROWS_AS(psnr(zero, GrayImage(Matrix::Zero(4, 5))), Error);
}

TEST_CASE("cosparsity") {
  const AnalysisOperator op = random_untf(24, 16, 9);
  CHECK(cosparsity(op, Vector::Zero(16)) == 24);
  const Matrix x = gaussian(16, 2000, 10);
  CHECK(mean_cosparsity(op, x) < 0.05 * 24);
  const Matrix xq = sample_cosparse(op, 6, 200, 11).matrix();
  CHECK(mean_cosparsity(op, xq, 1e-10) >= 6.0);
}

TEST_CASE("row_recovery_rate") {
  const AnalysisOperator ref = random_untf(24, 16, 12);
  CHECK(row_recovery_rate(ref, ref) == 1.0);

  Matrix shuffled(24, 16);
  for (Index i = 0; i < 24; ++i) shuffled.row(i) = (i % 2 ? -1.0 : 1.0) * ref.matrix().row(23 - i);
  CHECK(row_recovery_rate(ref.with_matrix(shuffled), ref) == 1.0);

  Matrix far = ref.matrix();
  for (Index i = 0; i < 24; ++i) {
    Vector e = gaussian(16, 1, 100 + static_cast<std::uint64_t>(i)).col(0);
    far.row(i) += 0.1 * e.normalized().transpose();
  }
  CHECK(row_recovery_rate(ref.with_matrix(far), ref) == 0.0);

  // one learned row close to two reference rows only counts once
  Matrix dup = ref.matrix();
  dup.row(1) = dup.row(0);
  CHECK(row_recovery_rate(ref.with_matrix(dup), ref) == doctest::Approx(23.0 / 24.0));
}

TEST_CASE("PGM and phantom") {
  const GrayImage ph = shepp_logan(64);
  CHECK(ph.height() == 64);
  CHECK(ph.pixels().minCoeff() >= 0.0);
  CHECK(ph.pixels().maxCoeff() <= 255.0);
  CHECK(ph.pixels().maxCoeff() > 200.0);
  CHECK(ph.pixels()(0, 0) == 0.0);

  const auto path = temp_file("ph.pgm");
  write_pgm(path, ph);
  const GrayImage back = read_pgm(path);
  CHECK((back.pixels() - ph.pixels()).cwiseAbs().maxCoeff() <= 0.5);
  write_pgm(path, back);
  CHECK(read_pgm(path).pixels() == back.pixels());

  Matrix wild(2, 2);
  wild << -20.0, 300.0, 12.4, 12.6;
  write_pgm(path, GrayImage(wild));
  Matrix clamped(2, 2);
  clamped << 0.0, 255.0, 12.0, 13.0;
  CHECK(read_pgm(path).pixels() == clamped);

  std::ofstream(path) << "P2\n2 2\n255\n0 0 0 0\n";
  CHECK_THROWS_AS(read_pgm(path), Error);
  CHECK_THROWS_AS(read_pgm(temp_file("missing.pgm")), Error);
}
