#pragma once

#include <random>

#include "aol/operators.hpp"
#include "aol/rng.hpp"
#include "aol/types.hpp"

namespace aol::test {

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  Rng rng = make_stream(seed, {0x7e57});
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
  return m;
}

// Orthonormal columns, i.e. W^T W = I, without row normalization.
inline AnalysisOperator random_tight(Index a, Index n, std::uint64_t seed) {
  return project_tf(AnalysisOperator(gaussian(a, n, seed)));
}

}  // namespace aol::test
