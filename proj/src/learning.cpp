#include "aol/learning.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>

#include "aol/kernels.hpp"
#include "aol/rng.hpp"

namespace aol {

void LearnConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(lambda > 0.0)) fail("lambda must be > 0");
  if (!(gamma > 0.0)) fail("gamma must be > 0");
  if (!(eta0 > 0.0)) fail("eta0 must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) fail("rho must lie in (0, 1)");
  if (!(eps > 0.0)) fail("eps must be > 0");
  if (!(eta_min > 0.0)) fail("eta_min must be > 0");
  if (k_max_inner < 1 || k_max_drs < 1 || outer_iters < 1) fail("iteration counts must be >= 1");
}

double soft_threshold(double beta, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "soft threshold needs alpha > 0");
  double out = 0.0;
  kernels::active().soft_threshold(&beta, &out, 1, alpha);
  return out;
}

Matrix soft_threshold(const Matrix& m, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "soft threshold needs alpha > 0");
  Matrix out(m.rows(), m.cols());
  kernels::soft_threshold(flat(m), flat(out), alpha);
  return out;
}

double denoising_objective(const AnalysisOperator& op, const Matrix& x, const Matrix& y,
                           double lambda) {
  require_same_dim(x.rows(), y.rows(), "denoising objective rows");
  require_same_dim(x.cols(), y.cols(), "denoising objective columns");
  return objective_l1(op, x) + 0.5 * lambda * (y - x).squaredNorm();
}

// ---------------------------------------------------------------------------
// Operator update
// ---------------------------------------------------------------------------

namespace {

class L1Evaluator {
 public:
  explicit L1Evaluator(const Matrix& x) : x_(x) {}

  double operator()(const Matrix& w) {
    z_.noalias() = w * x_;
    return kernels::abs_sum(flat(z_));
  }

  // Subgradient at w with random values in [-1, 1] on the dead zone.
  const Matrix& subgradient(const Matrix& w, Rng& rng) {
    z_.noalias() = w * x_;
    s_.resize(z_.rows(), z_.cols());
    if (kernels::dead_zone_sign(flat(z_), flat(s_), tol::sign) > 0) {
      std::uniform_real_distribution<double> uniform(-1.0, 1.0);
      for (Index k = 0; k < z_.size(); ++k) {
        if (std::abs(z_.data()[k]) <= tol::sign) s_.data()[k] = uniform(rng);
      }
    }
    g_.noalias() = s_ * x_.transpose();
    return g_;
  }

 private:
  const Matrix& x_;
  Matrix z_;
  Matrix s_;
  Matrix g_;
};

AnalysisOperator project_onto_constraint(const AnalysisOperator& w, const Constraint& constraint,
                                         Rng& rng) {
  AnalysisOperator tf = constraint.has_null_space()
                            ? project_tf_perp_null(w, *constraint.null_space)
                            : project_tf(w);
  return project_un(tf, rng);
}

}  // namespace

OperatorUpdateResult operator_update(const SignalMatrix& x, const AnalysisOperator& init,
                                     const LearnConfig& cfg) {
  cfg.validate();
  const Matrix& data = x.matrix();
  require_same_dim(init.cols(), data.rows(), "operator_update signal dimension");

  Rng sign_rng = make_stream(cfg.seed, {stream::sign});
  Rng unit_rng = make_stream(cfg.seed, {stream::unit_rows});
  L1Evaluator objective(data);

  const double c = cfg.constraint.row_norm_target(init.rows(), init.cols());
  AnalysisOperator current(init.matrix(), c, init.kind());
  Matrix previous = Matrix::Zero(init.rows(), init.cols());

  OperatorUpdateResult result;
  double f_current = objective(current.matrix());
  result.trace.push_back(f_current);
  result.evaluations = 1;
  double eta = cfg.eta0;

  int k = 1;
  while ((current.matrix() - previous).norm() >= cfg.eps && k <= cfg.k_max_inner) {
    const Matrix& g = objective.subgradient(current.matrix(), sign_rng);
    AnalysisOperator candidate =
        project_onto_constraint(current.with_matrix(current.matrix() - eta * g), cfg.constraint,
                                unit_rng);
    double f_candidate = objective(candidate.matrix());
    ++result.evaluations;
    while (f_candidate > f_current) {
      eta *= cfg.rho;
      if (eta < cfg.eta_min) {
        result.stalled = true;
        break;
      }
      candidate = project_onto_constraint(current.with_matrix(current.matrix() - eta * g),
                                          cfg.constraint, unit_rng);
      f_candidate = objective(candidate.matrix());
      ++result.evaluations;
    }
    if (result.stalled) break;

    previous = current.matrix();
    current = std::move(candidate);
    f_current = f_candidate;
    result.trace.push_back(f_current);
    result.max_frame_residual =
        std::max(result.max_frame_residual, frame_residual(current.matrix(), cfg.constraint));
    ++result.iterations;
    ++k;
  }

  result.final_eta = eta;
  if (result.stalled) {
    spdlog::debug("operator_update: step underflow after {} accepted steps", result.iterations);
    result.op = std::move(current);
  } else {
    result.op = current.with_matrix(std::move(previous));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Signal update
// ---------------------------------------------------------------------------

namespace {

// Applies (lambda I + gamma W^T W)^{-1}.
class RegularizedInverse {
 public:
  RegularizedInverse(const Matrix& w, const LearnConfig& cfg) {
    const Index n = w.cols();
    const Matrix gram = w.transpose() * w;
    const double lambda = cfg.lambda;
    const double gamma = cfg.gamma;
    if ((gram - Matrix::Identity(n, n)).norm() <= tol::tight_gram) {
      mode_ = Mode::Scale;
      scale_ = 1.0 / (lambda + gamma);
      return;
    }
    if (cfg.constraint.has_null_space()) {
      const NullSpaceBasis& ns = *cfg.constraint.null_space;
      if ((gram - ns.complement_projector()).norm() <= tol::tight_gram) {
        // (lambda I + gamma P_perp)^{-1} = P_perp / (lambda + gamma) + P_N / lambda
        mode_ = Mode::NullSpace;
        scale_ = 1.0 / (lambda + gamma);
        null_gain_ = 1.0 / lambda - scale_;
        basis_ = ns.basis();
        return;
      }
    }
    if (!cfg.allow_general_inverse) {
      throw Error(ErrorCode::NonTightOperator,
                  "operator Gram residual exceeds " + std::to_string(tol::tight_gram) +
                      " and no general inverse was requested");
    }
    mode_ = Mode::Dense;
    Matrix m = gamma * gram;
    m.diagonal().array() += lambda;
    inverse_ = m.llt().solve(Matrix::Identity(n, n));
  }

  void apply(const Matrix& rhs, Matrix& out) const {
    switch (mode_) {
      case Mode::Scale:
        out = scale_ * rhs;
        break;
      case Mode::NullSpace:
        out = scale_ * rhs;
        out.noalias() += null_gain_ * (basis_ * (basis_.transpose() * rhs));
        break;
      case Mode::Dense:
        out.noalias() = inverse_ * rhs;
        break;
    }
  }

 private:
  enum class Mode { Scale, NullSpace, Dense };
  Mode mode_ = Mode::Scale;
  double scale_ = 1.0;
  double null_gain_ = 0.0;
  Matrix basis_;
  Matrix inverse_;
};

}  // namespace

SignalUpdateResult signal_update(const SignalMatrix& y, const AnalysisOperator& op,
                                 const SignalMatrix& x_init, const LearnConfig& cfg) {
  cfg.validate();
  const Matrix& w = op.matrix();
  const Matrix& obs = y.matrix();
  require_same_dim(w.cols(), obs.rows(), "signal_update signal dimension");
  require_same_dim(obs.rows(), x_init.dim(), "signal_update initial signal dimension");
  require_same_dim(obs.cols(), x_init.count(), "signal_update signal count");

  const RegularizedInverse inverse(w, cfg);
  const double threshold = 1.0 / cfg.gamma;

  Matrix x = x_init.matrix();
  Matrix z = w * x;
  Matrix b = Matrix::Zero(z.rows(), z.cols());
  const Matrix fidelity = cfg.lambda * obs;
  Matrix rhs(obs.rows(), obs.cols());
  Matrix x_next(obs.rows(), obs.cols());
  Matrix v(z.rows(), z.cols());

  int k = 0;
  double change = std::numeric_limits<double>::infinity();
  // From X = Y, Z = W Y, B = 0 the first X step returns Y exactly, so the
  // change test only applies once B has moved.
  while ((k < 2 || change >= cfg.eps) && k < cfg.k_max_drs) {
    rhs = fidelity;
    rhs.noalias() += cfg.gamma * (w.transpose() * (z - b));
    inverse.apply(rhs, x_next);
    v.noalias() = w * x_next;
    v += b;
    kernels::soft_threshold(flat(v), flat(z), threshold);
    b = v - z;
    change = (x_next - x).norm();
    x.swap(x_next);
    ++k;
  }

  SignalUpdateResult result{SignalMatrix(std::move(x), SignalMatrix::Role::Clean), std::move(z),
                            std::move(b), k};
  return result;
}

// ---------------------------------------------------------------------------
// Alternating learner
// ---------------------------------------------------------------------------

LearnState aola(const SignalMatrix& y, const AnalysisOperator& init, const LearnConfig& cfg) {
  cfg.validate();
  LearnState state;

  if (cfg.noiseless) {
    OperatorUpdateResult r = operator_update(y, init, cfg);
    state.op = std::move(r.op);
    state.signals = y;
    state.codes = state.op.matrix() * y.matrix();
    state.dual = Matrix::Zero(state.codes.rows(), state.codes.cols());
    state.outer_iterations = 1;
    state.inner_iterations = r.iterations;
    state.stalled = r.stalled;
    state.objective_trace = std::move(r.trace);
    state.trace_round.assign(state.objective_trace.size(), 0);
    return state;
  }

  state.op = init;
  state.signals = y;
  state.codes = init.matrix() * y.matrix();
  state.dual = Matrix::Zero(state.codes.rows(), state.codes.cols());

  for (int round = 0; round < cfg.outer_iters; ++round) {
    LearnConfig inner = cfg;
    inner.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(round)});
    OperatorUpdateResult r = operator_update(state.signals, state.op, inner);
    const double op_change = (r.op.matrix() - state.op.matrix()).norm();
    state.inner_iterations += r.iterations;
    state.stalled = state.stalled || r.stalled;
    for (double f : r.trace) {
      state.objective_trace.push_back(f);
      state.trace_round.push_back(round);
    }
    state.op = std::move(r.op);

    SignalUpdateResult s = signal_update(y, state.op, state.signals, cfg);
    const double signal_change = (s.signals.matrix() - state.signals.matrix()).norm();
    state.drs_iterations += s.iterations;
    state.signals = std::move(s.signals);
    state.codes = std::move(s.codes);
    state.dual = std::move(s.dual);
    state.outer_iterations = round + 1;

    spdlog::debug("aola round {}: |dW| = {:.3e}, |dX| = {:.3e}", round, op_change, signal_change);
    if (op_change < cfg.eps && signal_change < cfg.eps) break;
  }
  return state;
}

}  // namespace aol
