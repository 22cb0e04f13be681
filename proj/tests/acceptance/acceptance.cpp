// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "aol/datagen.hpp"
#include "aol/experiments.hpp"
#include "aol/identifiability.hpp"
#include "aol/imaging.hpp"
#include "aol/learning.hpp"
#include "aol/operators.hpp"
#include "aol/rng.hpp"
#include "cli_run.hpp"

using namespace aol;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double secs) {
  if (!pass) ++failures;
  fmt::print("{} [{:2d}] {}: {} ({:.0f}s)\n", pass ? "PASS" : "FAIL", id, name, detail, secs);
  std::fflush(stdout);
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double mean_rate(const std::vector<RecoveryRow>& rows, Index q, double gamma) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : rows) {
    if (r.q == q && r.gamma == gamma) {
      sum += r.recovery_rate;
      ++count;
    }
  }
  return count ? sum / count : std::nan("");
}

// Criteria 1, 2 and 6 share the recovery runs.
struct RecoveryRuns {
  std::vector<RecoveryRow> paper;  // l = 768, gamma = 0
  std::vector<RecoveryRow> small;  // l = 384, q = 10
  std::vector<RecoveryRow> large;  // l = 1536, q = 10
};

RecoveryRuns recovery_runs() {
  RecoverSyntheticConfig cfg;
  cfg.trials = 10;
  cfg.iters = 50000;
  RecoveryRuns runs;
  cfg.q_list = {6, 8, 10, 12};
  cfg.gamma_list = {0.0};
  runs.paper = run_recover_synthetic(cfg);
  cfg.q_list = {10};
  cfg.gamma_list = {0.0, 1.0, 10.0};
  cfg.l = 384;
  runs.small = run_recover_synthetic(cfg);
  cfg.l = 1536;
  runs.large = run_recover_synthetic(cfg);
  return runs;
}

void criterion_recovery(const RecoveryRuns& runs, double secs) {
  std::string detail;
  double total = 0.0;
  for (Index q : {6, 8, 10, 12}) {
    const double m = mean_rate(runs.paper, q, 0.0);
    total += m;
    detail += fmt::format("q={} {:.3f} ", q, m);
  }
  const double mean = total / 4.0;
  report(1, "synthetic recovery at l=768, gamma=0", mean >= 0.95,
         detail + fmt::format("mean {:.3f} (need >= 0.95)", mean), secs);
}

void criterion_basin(const RecoveryRuns& runs, double secs) {
  const double slack = 0.05;
  bool pass = true;
  std::string detail;
  for (const auto* rows : {&runs.small, &runs.large}) {
    const double g0 = mean_rate(*rows, 10, 0.0);
    const double g1 = mean_rate(*rows, 10, 1.0);
    const double g10 = mean_rate(*rows, 10, 10.0);
    pass = pass && g0 + slack >= g1 && g1 + slack >= g10;
    detail += fmt::format("l={}: {:.3f} {:.3f} {:.3f}; ", rows == &runs.small ? 384 : 1536, g0,
                          g1, g10);
  }
  for (double g : {0.0, 1.0, 10.0}) {
    const double drop = mean_rate(runs.small, 10, g) - mean_rate(runs.large, 10, g);
    pass = pass && drop <= slack;
  }
  report(2, "basin trend over gamma {0,1,10} and l 384->1536", pass,
         detail + "need monotone in gamma and no l drop, 5-point slack", secs);
}

void criterion_monotone(const RecoveryRuns& runs) {
  int runs_total = 0;
  int bad = 0;
  for (const auto* rows : {&runs.paper, &runs.small, &runs.large}) {
    for (const auto& r : *rows) {
      ++runs_total;
      bad += r.monotone ? 0 : 1;
    }
  }
  report(6, "line-search monotonicity", bad == 0 && runs_total > 0,
         fmt::format("{} of {} recovery runs with an increasing accepted step", bad, runs_total),
         0.0);
}

void criterion_identifiability() {
  Timer t;
  IdentifiabilityConfig cfg;
  cfg.q_list = {0, 1, 3};
  cfg.samples = 1000;
  cfg.operators = 10;
  cfg.l = 96;
  const auto rows = run_identifiability(cfg);
  Index violations = 0;
  double q0_max = 0.0;
  double q1_min = 1.0;
  std::string q1;
  for (const auto& r : rows) {
    violations += r.dominance_violations;
    if (r.q == 0) q0_max = std::max(q0_max, r.report.lemma3_fraction());
    if (r.q == 1) q1_min = std::min(q1_min, r.report.lemma3_fraction());
  }
  const bool pass = violations == 0 && q0_max == 0.0 && q1_min < 1.0 && rows.size() == 30;
  report(3, "identifiability dominance and degeneracy", pass,
         fmt::format("{} dominance violations, q=0 max fraction {}, q=1 min fraction {:.4f}",
                     violations, q0_max, q1_min),
         t.seconds());
}

// Best iterate of subgradient descent on ||W x||_1 + lambda/2 ||y - x||^2
// with step 1 / (lambda k); strong convexity drives it to the optimum.
double subgradient_oracle(const Matrix& w, const Vector& y, double lambda, int iters) {
  Vector x = y;
  double best = (w * x).cwiseAbs().sum() + 0.5 * lambda * (y - x).squaredNorm();
  for (int k = 1; k <= iters; ++k) {
    const Vector z = w * x;
    const Vector s = z.unaryExpr([](double v) { return static_cast<double>((v > 0) - (v < 0)); });
    x -= (w.transpose() * s + lambda * (x - y)) / (lambda * k);
    best = std::min(best, (w * x).cwiseAbs().sum() + 0.5 * lambda * (y - x).squaredNorm());
  }
  return best;
}

void criterion_drs_oracle() {
  Timer t;
  Rng rng = make_stream(4, {0xacc});
  std::uniform_int_distribution<Index> pick_n(2, 8);
  std::uniform_real_distribution<double> pick_lambda(0.2, 2.0);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Index n = pick_n(rng);
    const Index a = std::uniform_int_distribution<Index>(n, 12)(rng);
    const AnalysisOperator op = random_untf(a, n, derive_seed(4, {static_cast<std::uint64_t>(i)}));
    Vector y(n);
    for (Index k = 0; k < n; ++k) y(k) = 2.0 * normal(rng);
    LearnConfig cfg;
    cfg.lambda = pick_lambda(rng);
    cfg.gamma = 1.0;
    cfg.k_max_drs = 100000;
    cfg.eps = 1e-14;
    const SignalMatrix ys(Matrix(y), SignalMatrix::Role::Observed);
    const SignalUpdateResult r = signal_update(ys, op, ys, cfg);
    const double f_drs = denoising_objective(op, r.signals.matrix(), Matrix(y), cfg.lambda);
    const double f_oracle = subgradient_oracle(op.matrix(), y, cfg.lambda, 2000000);
    worst = std::max(worst, std::abs(f_drs - f_oracle));
  }
  report(4, "DRS objective matches subgradient oracle", worst <= 1e-4,
         fmt::format("max |f_drs - f_oracle| = {:.2e} over 50 instances (need <= 1e-4)", worst),
         t.seconds());
}

void criterion_projections() {
  Timer t;
  double worst_untf = 0.0;
  double worst_idem = 0.0;
  double worst_orth = 0.0;
  int not_converged = 0;
  for (auto [a, n] : {std::pair<Index, Index>{6, 4}, {24, 16}, {128, 64}}) {
    const NullSpaceBasis dc = NullSpaceBasis::constant(n);
    for (int i = 0; i < 1000; ++i) {
      Rng rng = make_stream(7, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(i)});
      std::normal_distribution<double> normal;
      Matrix m(a, n);
      for (Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
      const AnalysisOperator op(m);
      const UntfResult r = untf_project(op, Constraint::untf(), 20000, 1e-8, rng);
      not_converged += r.converged ? 0 : 1;
      worst_untf = std::max({worst_untf, frame_residual(r.op.matrix()),
                             row_residual(r.op.matrix(), std::sqrt(double(n) / double(a)))});
      const AnalysisOperator p1 = project_tf(op);
      worst_idem = std::max(worst_idem, (project_tf(p1).matrix() - p1.matrix()).norm());
      worst_orth = std::max(worst_orth,
                            (project_tf_perp_null(op, dc).matrix() * dc.basis()).cwiseAbs().maxCoeff());
    }
  }
  const bool pass = worst_untf <= 1e-8 && worst_idem <= 1e-12 && worst_orth <= 1e-10;
  report(5, "projection invariants", pass,
         fmt::format("untf residual {:.1e} ({} not converged), idempotence {:.1e}, "
                     "null orthogonality {:.1e}",
                     worst_untf, not_converged, worst_idem, worst_orth),
         t.seconds());
}

LearnPatchesConfig phantom_learning_config(const fs::path& image) {
  LearnPatchesConfig cfg;
  cfg.image = image;
  cfg.p = 8;
  cfg.l = 2048;
  cfg.a = 128;
  cfg.dc_null_space = true;
  cfg.mean_remove = false;
  cfg.noiseless = true;
  cfg.inner_iters = 20000;
  return cfg;
}

AnalysisOperator criterion_phantom_learning() {
  Timer t;
  const GrayImage image = shepp_logan(512);
  const LearnPatchesResult r = run_learn_patches(phantom_learning_config("phantom512.pgm"), image);
  report(7, "phantom patch learning beats two-times Haar", r.final_objective < r.baseline_objective,
         fmt::format("objective {:.6g} -> {:.6g}, Haar {:.6g} (ratio {:.3f})", r.initial_objective,
                     r.final_objective, r.baseline_objective,
                     r.final_objective / r.baseline_objective),
         t.seconds());
  return r.state.op;
}

void criterion_denoising(const AnalysisOperator& learned) {
  Timer t;
  const GrayImage image = shepp_logan(128);
  DenoiseConfig cfg;
  cfg.noise_sigma = 10.0;
  cfg.lambda = 0.1;
  cfg.gamma = 0.5;
  cfg.iters = 1000;
  cfg.trials = 5;
  auto average = [](const DenoiseResult& r, bool denoised) {
    double s = 0.0;
    for (const auto& row : r.rows) s += denoised ? row.psnr_denoised : row.psnr_noisy;
    return s / static_cast<double>(r.rows.size());
  };
  const DenoiseResult fd = run_denoise(cfg, image, fd_operator(8));
  const DenoiseResult lr = run_denoise(cfg, image, learned);
  const double noisy = average(fd, false);
  const double fd_psnr = average(fd, true);
  const double lr_psnr = average(lr, true);
  const bool pass = fd_psnr - noisy >= 3.0 && lr_psnr >= fd_psnr - 1.0;
  report(8, "phantom denoising, FD gain and learned vs FD", pass,
         fmt::format("noisy {:.2f} dB, FD {:.2f} dB (gain {:.2f}, need >= 3), learned {:.2f} dB "
                     "(need >= FD - 1)",
                     noisy, fd_psnr, fd_psnr - noisy, lr_psnr),
         t.seconds());
}

void criterion_cosparsity() {
  Timer t;
  LearnPatchesConfig cfg;
  cfg.image = "phantom128.pgm";
  cfg.noiseless = false;
  cfg.noise_sigma = 5.0;
  cfg.lambda = 0.5;
  cfg.gamma = 0.5;
  const LearnPatchesResult r = run_learn_patches(cfg, shepp_logan(128));
  const double factor = r.cosparsity_x / r.cosparsity_y;
  report(9, "noise-aware learning raises cosparsity", r.cosparsity_x >= 2.0 * r.cosparsity_y,
         fmt::format("mean cosparsity {:.3f} -> {:.3f} (factor {:.1f}, need >= 2)", r.cosparsity_y,
                     r.cosparsity_x, factor),
         t.seconds());
}

void criterion_determinism(const std::string& cli, const fs::path& work) {
  Timer t;
  const fs::path dir = work / "determinism";
  fs::remove_all(dir);
  auto config = [&](const std::string& name, const std::string& text) {
    const fs::path p = dir / "configs" / (name + ".json");
    test::write_text(p, text);
    return p;
  };
  const std::string image = (dir / "phantom" / "phantom.pgm").string();
  const std::vector<std::pair<std::string, fs::path>> commands = {
      {"phantom", config("phantom", R"({"size": 64})")},
      {"recover-synthetic", config("recover", R"({"l": 200, "q_list": [8, 10],
        "gamma_list": [0, 1, "inf"], "trials": 2, "iters": 500, "seed": 5})")},
      {"identifiability", config("ident", R"({"a": 12, "n": 8, "l": 24, "q_list": [0, 3],
        "samples": 50, "operators": 2, "seed": 5})")},
      {"learn-patches", config("learn", R"({"image": ")" + image + R"(", "p": 4, "l": 300,
        "noiseless": false, "noise_sigma": 5, "outer_iters": 2, "inner_iters": 200,
        "drs_iters": 100, "seed": 5})")},
      {"denoise", config("denoise", R"({"image": ")" + image + R"(", "operator": "fd", "p": 4,
        "iters": 50, "trials": 2, "seed": 5})")},
  };
  // the phantom run doubles as the image input of the later commands
  bool pass = test::run_cli(cli, "phantom", commands[0].second, dir / "phantom") == 0;
  std::string detail;
  for (const auto& [command, cfg] : commands) {
    const int first = test::run_cli(cli, command, cfg, dir / (command + "_a"), "--threads 2");
    const int second = test::run_cli(cli, command, cfg, dir / (command + "_b"));
    const bool same = first == 0 && second == 0 &&
                      test::tree(dir / (command + "_a")) == test::tree(dir / (command + "_b"));
    pass = pass && same;
    detail += fmt::format("{} {}; ", command, same ? "identical" : "DIFFERS");
  }
  report(10, "CLI reruns are byte-identical", pass, detail, t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string cli;
  std::string work = "acceptance_work";
  std::vector<int> only;
  app.add_option("--cli", cli, "Path of the aol executable")->required();
  app.add_option("--work", work, "Scratch directory");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);
  setenv("AOL_LOG", "off", 1);
  init_logging();

  auto want = [&](int id) { return only.empty() || std::count(only.begin(), only.end(), id) > 0; };

  if (want(1) || want(2) || want(6)) {
    Timer t;
    const RecoveryRuns runs = recovery_runs();
    const double secs = t.seconds();
    if (want(1)) criterion_recovery(runs, secs);
    if (want(2)) criterion_basin(runs, secs);
    if (want(6)) criterion_monotone(runs);
  }
  if (want(3)) criterion_identifiability();
  if (want(4)) criterion_drs_oracle();
  if (want(5)) criterion_projections();
  if (want(7) || want(8)) {
    const AnalysisOperator learned = criterion_phantom_learning();
    if (want(8)) criterion_denoising(learned);
  }
  if (want(9)) criterion_cosparsity();
  if (want(10)) criterion_determinism(cli, work);

  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
