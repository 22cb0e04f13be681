#pragma once

#include <cstdint>
#include <vector>

#include "aol/operators.hpp"
#include "aol/types.hpp"

namespace aol {

// Hyperparameters of the alternating learner and its two sub-solvers.
struct LearnConfig {
  double lambda = 0.5;     // data-fidelity weight
  double gamma = 0.5;      // augmented-Lagrangian penalty of the DRS solver
  double eta0 = 1e-3;      // initial subgradient step
  double rho = 0.5;        // step shrink factor of the line search, in (0, 1)
  double eps = 1e-10;      // Frobenius-change stopping threshold
  double eta_min = 1e-14;  // line search gives up below this step
  int k_max_inner = 1000;  // operator-update iterations
  int k_max_drs = 1000;    // DRS iterations
  int outer_iters = 10;    // alternating rounds
  Constraint constraint;
  std::uint64_t seed = 0;
  bool noiseless = false;
  // Let signal_update invert lambda I + gamma W^T W densely when W is neither
  // a tight frame nor tight on a prescribed null-space complement.
  bool allow_general_inverse = false;

  // Throws InvalidArgument on out-of-range values.
  void validate() const;
};

struct OperatorUpdateResult {
  AnalysisOperator op;
  std::vector<double> trace;  // objective at the start, then after each accepted step
  int iterations = 0;         // accepted steps
  int evaluations = 0;        // objective evaluations including rejected candidates
  bool stalled = false;       // step fell below eta_min without an accepted step
  double final_eta = 0.0;
  double max_frame_residual = 0.0;  // worst constraint residual over accepted iterates
};

// Projected subgradient descent on ||W X||_1 over the constraint set with a
// shrinking-step line search. Each candidate is P_UN(P_TF(W - eta G)); the
// step is shrunk by rho until the objective does not increase. The step is
// carried across iterations, never reset. Stops when an accepted step moves
// less than eps or after k_max_inner iterations and returns the iterate
// preceding the last one; on a stall it returns the current iterate.
OperatorUpdateResult operator_update(const SignalMatrix& x, const AnalysisOperator& init,
                                     const LearnConfig& cfg);

struct SignalUpdateResult {
  SignalMatrix signals;
  Matrix codes;  // Z
  Matrix dual;   // B
  int iterations = 0;
};

// Douglas-Rachford (ADMM) solve of min_X ||W X||_1 + lambda/2 ||Y - X||_F^2
// with splitting Z = W X, starting from X_init, Z = W X_init, B = 0.
SignalUpdateResult signal_update(const SignalMatrix& y, const AnalysisOperator& op,
                                 const SignalMatrix& x_init, const LearnConfig& cfg);

// S_alpha(beta) = beta - alpha sgn(beta) if |beta| >= alpha, else 0.
double soft_threshold(double beta, double alpha);
Matrix soft_threshold(const Matrix& m, double alpha);

// ||W X||_1 + lambda/2 ||Y - X||_F^2
double denoising_objective(const AnalysisOperator& op, const Matrix& x, const Matrix& y,
                           double lambda);

struct LearnState {
  AnalysisOperator op;
  SignalMatrix signals;
  Matrix dual;
  Matrix codes;
  int outer_iterations = 0;
  int inner_iterations = 0;  // accepted operator steps summed over rounds
  int drs_iterations = 0;
  bool stalled = false;      // some operator update stalled
  std::vector<double> objective_trace;
  std::vector<int> trace_round;  // outer round of each trace entry
};

// Alternating minimization: operator update on the current signals, then a
// DRS signal update, until both Frobenius changes drop below eps or
// outer_iters rounds ran. In noiseless mode the signals stay equal to Y and
// a single operator update runs.
LearnState aola(const SignalMatrix& y, const AnalysisOperator& init, const LearnConfig& cfg);

}  // namespace aol
