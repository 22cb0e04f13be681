#pragma once

#include <cstdint>
#include <limits>

#include "aol/types.hpp"

namespace aol {

// Synthetic recovery setup: reference operator dimensions, training size,
// cosparsity and the initialization distance.
struct SyntheticSpec {
  Index a = 24;
  Index n = 16;
  Index l = 768;
  Index q = 8;
  double gamma_perturb = 0.0;  // +infinity means a random initialization
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr double kInfinitePerturbation = std::numeric_limits<double>::infinity();

// Gaussian a x n matrix pushed onto the UNTF set by alternating projections
// (tolerance 1e-8). Retries with a fresh draw up to five times.
AnalysisOperator random_untf(Index a, Index n, std::uint64_t seed);

// count signals, each orthogonal to q distinct rows of the operator chosen
// uniformly at random: a standard normal draw projected onto the orthogonal
// complement of the selected rows. Columns are not normalized.
SignalMatrix sample_cosparse(const AnalysisOperator& op, Index q, Index count, std::uint64_t seed);

// untf_project(W0 + gamma N) with N a Gaussian matrix of unit Frobenius norm;
// gamma = kInfinitePerturbation returns an independent random UNTF.
AnalysisOperator perturb_operator(const AnalysisOperator& op0, double gamma, std::uint64_t seed);

}  // namespace aol
