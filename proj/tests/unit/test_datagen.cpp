#include <cmath>

#include "aol/datagen.hpp"
#include "aol/operators.hpp"
#include "doctest.h"

using namespace aol;

TEST_CASE("random_untf") {
  SUBCASE("square case is orthogonal with unit rows") {
    const Matrix w = random_untf(16, 16, 3).matrix();
    CHECK((w.transpose() * w - Matrix::Identity(16, 16)).norm() <= 1e-8);
    CHECK((w * w.transpose() - Matrix::Identity(16, 16)).norm() <= 1e-7);
  }
  SUBCASE("24x16, seed 0") {
    const AnalysisOperator op = random_untf(24, 16, 0);
    CHECK(frame_residual(op.matrix()) <= 1e-8);
    CHECK(row_residual(op.matrix(), std::sqrt(2.0 / 3.0)) <= 1e-8);
    CHECK(random_untf(24, 16, 0).matrix() == op.matrix());
    CHECK(random_untf(24, 16, 1).matrix() != op.matrix());
  }
}

TEST_CASE("sample_cosparse") {
  SUBCASE("q = 0 gives unconstrained columns") {
    const AnalysisOperator op = random_untf(24, 16, 1);
    const Matrix x = sample_cosparse(op, 0, 50, 2).matrix();
    CHECK(x.rows() == 16);
    CHECK(x.cols() == 50);
    CHECK(((op.matrix() * x).cwiseAbs().array() <= 1e-10).count() == 0);
  }
  SUBCASE("q = n - 1 on the identity hits one coordinate") {
    const AnalysisOperator op(Matrix::Identity(5, 5), 1.0);
    const Matrix x = sample_cosparse(op, 4, 20, 3).matrix();
    for (Index j = 0; j < x.cols(); ++j) CHECK((x.col(j).array().abs() > 1e-10).count() == 1);
  }
  SUBCASE("24x16 UNTF, q = 8, 768 columns, seed 5") {
    const AnalysisOperator op = random_untf(24, 16, 4);
    const Matrix z = op.matrix() * sample_cosparse(op, 8, 768, 5).matrix();
    for (Index j = 0; j < z.cols(); ++j) CHECK((z.col(j).array().abs() <= 1e-10).count() >= 8);
  }
  SUBCASE("every q, many draws") {
    const AnalysisOperator op = random_untf(12, 8, 6);
    for (Index q = 0; q < 8; ++q) {
      const Matrix z = op.matrix() * sample_cosparse(op, q, 1000, 7 + static_cast<std::uint64_t>(q)).matrix();
      Index bad = 0;
      for (Index j = 0; j < z.cols(); ++j) bad += (z.col(j).array().abs() <= 1e-10).count() < q;
      CHECK(bad == 0);
    }
  }
  SUBCASE("deterministic") {
    const AnalysisOperator op = random_untf(24, 16, 8);
    CHECK(sample_cosparse(op, 6, 30, 9).matrix() == sample_cosparse(op, 6, 30, 9).matrix());
  }
  SUBCASE("degenerate rows are rejected") {
    // All rows equal: any two selected rows have rank 1.
    const AnalysisOperator op(Matrix::Ones(6, 4));
    CHECK_THROWS_AS(sample_cosparse(op, 2, 1, 1), Error);
  }
  SUBCASE("q >= n is invalid") {
    const AnalysisOperator op = random_untf(8, 4, 1);
    CHECK_THROWS_AS(sample_cosparse(op, 4, 1, 1), Error);
  }
}

TEST_CASE("perturb_operator") {
  const AnalysisOperator op0 = random_untf(24, 16, 10);
  SUBCASE("gamma = 0 returns the feasible input") {
    CHECK((perturb_operator(op0, 0.0, 1).matrix() - op0.matrix()).norm() <= 1e-7);
  }
  SUBCASE("gamma = inf ignores the reference") {
    const AnalysisOperator other = random_untf(24, 16, 11);
    CHECK(perturb_operator(op0, kInfinitePerturbation, 3).matrix() ==
          perturb_operator(other, kInfinitePerturbation, 3).matrix());
  }
  SUBCASE("gamma = 1 stays closer than a random operator") {
    int closer = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const double near = (perturb_operator(op0, 1.0, s).matrix() - op0.matrix()).norm();
      const double far = (random_untf(24, 16, 1000 + s).matrix() - op0.matrix()).norm();
      closer += near < far;
    }
    CHECK(closer >= 95);
  }
  SUBCASE("output is feasible") {
    const AnalysisOperator p = perturb_operator(op0, 10.0, 4);
    CHECK(frame_residual(p.matrix()) <= 1e-8);
    CHECK(row_residual(p.matrix(), op0.row_norm_target()) <= 1e-8);
  }
  SUBCASE("negative gamma is invalid") {
    CHECK_THROWS_AS(perturb_operator(op0, -1.0, 1), Error);
  }
}
