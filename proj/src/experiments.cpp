#include "aol/experiments.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "aol/checkpoint.hpp"
#include "aol/datagen.hpp"
#include "aol/matrix_io.hpp"
#include "aol/operators.hpp"
#include "aol/rng.hpp"

namespace aol {

using nlohmann::ordered_json;

namespace {

// Runs body(i) for i in [0, count) on up to threads workers. Results must be
// written to per-index slots by the body; the first failure by index is
// rethrown so errors are reproducible too.
template <class Body>
void parallel_for(std::size_t count, int threads, Body body) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed = true;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string gamma_text(double g) { return std::isinf(g) ? "inf" : format_real(g); }

void parse_step(const ConfigDocument& doc, std::optional<double>& eta0, double& per_sample) {
  if (doc.has("eta0")) {
    doc.require(!doc.has("eta0_per_sample"), "eta0_per_sample", "cannot be combined with eta0");
    eta0 = doc.real("eta0");
    doc.require(*eta0 > 0.0, "eta0", "must be > 0");
  }
  per_sample = doc.real("eta0_per_sample", per_sample);
  doc.require(per_sample > 0.0, "eta0_per_sample", "must be > 0");
}

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1]) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// recover-synthetic
// ---------------------------------------------------------------------------

RecoverSyntheticConfig parse_recover_synthetic(const ConfigDocument& doc) {
  doc.allow_only({"a", "n", "l", "q_list", "gamma_list", "trials", "iters", "eta0",
                  "eta0_per_sample", "rho", "eps", "seed"});
  RecoverSyntheticConfig cfg;
  cfg.a = doc.integer("a", 24);
  cfg.n = doc.integer("n", 16);
  cfg.l = doc.integer("l", 768);
  doc.require(cfg.n >= 1, "n", "must be >= 1");
  doc.require(cfg.a >= cfg.n, "a", "must be >= n");
  doc.require(cfg.l >= 1, "l", "must be >= 1");
  for (auto q : doc.integer_list("q_list")) {
    doc.require(q >= 0 && q < cfg.n, "q_list", "entries must satisfy 0 <= q < n");
    cfg.q_list.push_back(q);
  }
  cfg.gamma_list = doc.real_or_inf_list("gamma_list", std::vector<double>{0.0});
  for (double g : cfg.gamma_list) doc.require(g >= 0.0, "gamma_list", "entries must be >= 0");
  cfg.trials = static_cast<int>(doc.integer("trials", 1));
  doc.require(cfg.trials >= 0, "trials", "must be >= 0");
  cfg.iters = static_cast<int>(doc.integer("iters", 50000));
  doc.require(cfg.iters >= 1, "iters", "must be >= 1");
  parse_step(doc, cfg.eta0, cfg.eta0_per_sample);
  cfg.rho = doc.real("rho", cfg.rho);
  doc.require(cfg.rho > 0.0 && cfg.rho < 1.0, "rho", "must lie in (0, 1)");
  cfg.eps = doc.real("eps", cfg.eps);
  doc.require(cfg.eps > 0.0, "eps", "must be > 0");
  cfg.seed = doc.seed("seed", 0);
  return cfg;
}

double RecoverSyntheticConfig::initial_step() const {
  return eta0 ? *eta0 : eta0_per_sample / static_cast<double>(l);
}

std::vector<RecoveryRow> run_recover_synthetic(const RecoverSyntheticConfig& cfg, int threads) {
  std::vector<Index> qs = cfg.q_list;
  std::vector<double> gammas = cfg.gamma_list;
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());

  struct Job {
    Index q;
    double gamma;
    int trial;
  };
  std::vector<Job> jobs;
  for (Index q : qs)
    for (double g : gammas)
      for (int t = 0; t < cfg.trials; ++t) jobs.push_back({q, g, t});

  std::vector<RecoveryRow> rows(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    const auto start = std::chrono::steady_clock::now();
    const auto q = static_cast<std::uint64_t>(job.q);
    const auto t = static_cast<std::uint64_t>(job.trial);
    const AnalysisOperator op0 = random_untf(cfg.a, cfg.n, derive_seed(cfg.seed, {q, t, 1}));
    const SignalMatrix x = sample_cosparse(op0, job.q, cfg.l, derive_seed(cfg.seed, {q, t, 2}));
    const AnalysisOperator init =
        perturb_operator(op0, job.gamma, derive_seed(cfg.seed, {stream::perturb, t}));

    LearnConfig learn;
    learn.eta0 = cfg.initial_step();
    learn.rho = cfg.rho;
    learn.eps = cfg.eps;
    learn.k_max_inner = cfg.iters;
    learn.noiseless = true;
    learn.seed = derive_seed(cfg.seed, {q, t, 3});
    const OperatorUpdateResult r = operator_update(x, init, learn);

    RecoveryRow& row = rows[i];
    row.q = job.q;
    row.gamma = job.gamma;
    row.trial = job.trial;
    row.recovery_rate = row_recovery_rate(r.op, op0);
    row.initial_recovery_rate = row_recovery_rate(init, op0);
    row.final_objective = objective_l1(r.op, x.matrix());
    row.iterations = r.iterations;
    row.stalled = r.stalled;
    row.monotone = non_increasing(r.trace);
    spdlog::info("recover q={} gamma={} trial={}: rate {:.4f} (from {:.4f}), {} steps, {:.2f}s",
                 job.q, gamma_text(job.gamma), job.trial, row.recovery_rate,
                 row.initial_recovery_rate, row.iterations, elapsed_seconds(start));
  });
  return rows;
}

void write_recovery_csv(std::ostream& os, const std::vector<RecoveryRow>& rows) {
  os << "q,gamma,trial,recovery_rate,initial_recovery_rate,final_objective,iterations,stalled,"
        "monotone\n";
  for (const RecoveryRow& r : rows) {
    os << r.q << ',' << gamma_text(r.gamma) << ',' << r.trial << ',' << format_real(r.recovery_rate)
       << ',' << format_real(r.initial_recovery_rate) << ',' << format_real(r.final_objective)
       << ',' << r.iterations << ',' << (r.stalled ? 1 : 0) << ',' << (r.monotone ? 1 : 0)
       << '\n';
  }
}

// ---------------------------------------------------------------------------
// identifiability
// ---------------------------------------------------------------------------

IdentifiabilityConfig parse_identifiability(const ConfigDocument& doc) {
  doc.allow_only({"a", "n", "l", "q_list", "samples", "operators", "zero_tol", "seed"});
  IdentifiabilityConfig cfg;
  cfg.a = doc.integer("a", 24);
  cfg.n = doc.integer("n", 16);
  cfg.l = doc.integer("l", 96);
  doc.require(cfg.n >= 1, "n", "must be >= 1");
  doc.require(cfg.a >= cfg.n, "a", "must be >= n");
  doc.require(cfg.l >= cfg.n, "l", "must be >= n");
  for (auto q : doc.integer_list("q_list")) {
    doc.require(q >= 0 && q < cfg.n, "q_list", "entries must satisfy 0 <= q < n");
    cfg.q_list.push_back(q);
  }
  cfg.samples = doc.integer("samples", 1000);
  doc.require(cfg.samples >= 1, "samples", "must be >= 1");
  cfg.operators = static_cast<int>(doc.integer("operators", 10));
  doc.require(cfg.operators >= 0, "operators", "must be >= 0");
  cfg.zero_tol = doc.real("zero_tol", cfg.zero_tol);
  doc.require(cfg.zero_tol >= 0.0, "zero_tol", "must be >= 0");
  cfg.seed = doc.seed("seed", 0);
  return cfg;
}

std::vector<IdentifiabilityRow> run_identifiability(const IdentifiabilityConfig& cfg,
                                                    int threads) {
  std::vector<Index> qs = cfg.q_list;
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());

  std::vector<std::pair<Index, int>> jobs;
  for (Index q : qs)
    for (int k = 0; k < cfg.operators; ++k) jobs.emplace_back(q, k);

  std::vector<IdentifiabilityRow> rows(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const auto [q, k] = jobs[i];
    const auto start = std::chrono::steady_clock::now();
    const auto uq = static_cast<std::uint64_t>(q);
    const auto uk = static_cast<std::uint64_t>(k);
    const AnalysisOperator op = random_untf(cfg.a, cfg.n, derive_seed(cfg.seed, {uk}));
    const SignalMatrix x = sample_cosparse(op, q, cfg.l, derive_seed(cfg.seed, {uk, uq}));
    IdentifiabilityRow& row = rows[i];
    row.q = q;
    row.op_index = k;
    row.report = identifiability_fraction(op, x.matrix(), cfg.samples,
                                          derive_seed(cfg.seed, {uk, uq, 1}), cfg.zero_tol);
    for (std::size_t s = 0; s < row.report.lemma3_margins.size(); ++s) {
      if (row.report.theorem1_margins[s] > 0.0 && !(row.report.lemma3_margins[s] > 0.0)) {
        ++row.dominance_violations;
      }
    }
    spdlog::info("identifiability q={} operator={}: lemma3 {:.1f}%, theorem1 {:.1f}%, {:.2f}s", q,
                 k, 100.0 * row.report.lemma3_fraction(), 100.0 * row.report.theorem1_fraction(),
                 elapsed_seconds(start));
  });
  return rows;
}

void write_identifiability_csv(std::ostream& os, const std::vector<IdentifiabilityRow>& rows) {
  os << "q,operator,samples,lemma3_pct,theorem1_pct,dominance_violations,cosupport_size,"
        "kernel_dim\n";
  for (const auto& r : rows) {
    os << r.q << ',' << r.op_index << ',' << r.report.n_samples << ','
       << format_real(100.0 * r.report.lemma3_fraction()) << ','
       << format_real(100.0 * r.report.theorem1_fraction()) << ',' << r.dominance_violations
       << ',' << r.report.cosupport_size << ',' << r.report.kernel_dim << '\n';
  }
}

std::string identifiability_summary_json(const std::vector<IdentifiabilityRow>& rows) {
  ordered_json per_q = ordered_json::array();
  std::size_t i = 0;
  while (i < rows.size()) {
    const Index q = rows[i].q;
    double l3 = 0.0;
    double t1 = 0.0;
    double min_l3 = 1.0;
    Index violations = 0;
    std::size_t count = 0;
    for (; i < rows.size() && rows[i].q == q; ++i, ++count) {
      l3 += rows[i].report.lemma3_fraction();
      t1 += rows[i].report.theorem1_fraction();
      min_l3 = std::min(min_l3, rows[i].report.lemma3_fraction());
      violations += rows[i].dominance_violations;
    }
    ordered_json e;
    e["q"] = q;
    e["operators"] = count;
    e["mean_lemma3_pct"] = 100.0 * l3 / static_cast<double>(count);
    e["mean_theorem1_pct"] = 100.0 * t1 / static_cast<double>(count);
    e["min_lemma3_pct"] = 100.0 * min_l3;
    e["dominance_violations"] = violations;
    per_q.push_back(std::move(e));
  }
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["per_q"] = std::move(per_q);
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// learn-patches
// ---------------------------------------------------------------------------

LearnPatchesConfig parse_learn_patches(const ConfigDocument& doc) {
  doc.allow_only({"image", "p", "l", "a", "constraint", "mean_remove", "edge_patches", "noiseless",
                  "noise_sigma",
                  "lambda", "gamma", "eta0", "eta0_per_sample", "rho", "eps", "outer_iters",
                  "inner_iters",
                  "drs_iters", "seed"});
  LearnPatchesConfig cfg;
  cfg.image = doc.path("image");
  cfg.p = doc.integer("p", 8);
  doc.require(cfg.p >= 2, "p", "must be >= 2");
  cfg.l = doc.integer("l", 2048);
  doc.require(cfg.l >= 1, "l", "must be >= 1");
  cfg.a = doc.integer("a", 2 * cfg.p * cfg.p);
  doc.require(cfg.a >= cfg.p * cfg.p, "a", "must be >= p * p");
  const std::string constraint = doc.string("constraint", "untf");
  doc.require(constraint == "untf" || constraint == "dc", "constraint",
              "must be \"untf\" or \"dc\"");
  cfg.dc_null_space = constraint == "dc";
  cfg.mean_remove = doc.boolean("mean_remove", true);
  cfg.edge_patches = doc.boolean("edge_patches", true);
  cfg.noiseless = doc.boolean("noiseless", true);
  cfg.noise_sigma = doc.real("noise_sigma", 0.0);
  doc.require(cfg.noise_sigma >= 0.0, "noise_sigma", "must be >= 0");
  cfg.lambda = doc.real("lambda", cfg.lambda);
  doc.require(cfg.lambda > 0.0, "lambda", "must be > 0");
  cfg.gamma = doc.real("gamma", cfg.gamma);
  doc.require(cfg.gamma > 0.0, "gamma", "must be > 0");
  parse_step(doc, cfg.eta0, cfg.eta0_per_sample);
  cfg.rho = doc.real("rho", cfg.rho);
  doc.require(cfg.rho > 0.0 && cfg.rho < 1.0, "rho", "must lie in (0, 1)");
  cfg.eps = doc.real("eps", cfg.eps);
  doc.require(cfg.eps > 0.0, "eps", "must be > 0");
  cfg.outer_iters = static_cast<int>(doc.integer("outer_iters", cfg.outer_iters));
  doc.require(cfg.outer_iters >= 1, "outer_iters", "must be >= 1");
  cfg.inner_iters = static_cast<int>(doc.integer("inner_iters", cfg.inner_iters));
  doc.require(cfg.inner_iters >= 1, "inner_iters", "must be >= 1");
  cfg.drs_iters = static_cast<int>(doc.integer("drs_iters", cfg.drs_iters));
  doc.require(cfg.drs_iters >= 1, "drs_iters", "must be >= 1");
  cfg.seed = doc.seed("seed", 0);
  return cfg;
}

double LearnPatchesConfig::initial_step() const {
  return eta0 ? *eta0 : eta0_per_sample / static_cast<double>(l);
}

LearnPatchesResult run_learn_patches(const LearnPatchesConfig& cfg, const GrayImage& image) {
  const Index n = cfg.p * cfg.p;
  GrayImage train = image;
  if (cfg.noise_sigma > 0.0) {
    Rng rng = make_stream(cfg.seed, {stream::noise});
    std::normal_distribution<double> normal(0.0, cfg.noise_sigma);
    Matrix px = image.pixels();
    for (Index c = 0; c < px.cols(); ++c)
      for (Index r = 0; r < px.rows(); ++r) px(r, c) += normal(rng);
    train = GrayImage(std::move(px));
  }

  LearnPatchesResult result;
  const std::uint64_t patch_seed = derive_seed(cfg.seed, {stream::patches});
  result.patches = cfg.edge_patches
                       ? extract_edge_patches(train, cfg.p, cfg.l, cfg.mean_remove, patch_seed)
                       : extract_patches(train, cfg.p, cfg.l, cfg.mean_remove, patch_seed);
  const SignalMatrix& y = result.patches.patches;

  LearnConfig& learn = result.learn;
  learn.lambda = cfg.lambda;
  learn.gamma = cfg.gamma;
  learn.eta0 = cfg.initial_step();
  learn.rho = cfg.rho;
  learn.eps = cfg.eps;
  learn.k_max_inner = cfg.inner_iters;
  learn.k_max_drs = cfg.drs_iters;
  learn.outer_iters = cfg.outer_iters;
  learn.noiseless = cfg.noiseless;
  // one projection pair per step leaves the operator only near the frame set
  learn.allow_general_inverse = true;
  learn.seed = derive_seed(cfg.seed, {2});
  if (cfg.dc_null_space) learn.constraint = Constraint::with_null_space(NullSpaceBasis::constant(n));

  AnalysisOperator init = random_untf(cfg.a, n, derive_seed(cfg.seed, {1}));
  if (cfg.dc_null_space) {
    Rng rng = make_stream(cfg.seed, {stream::unit_rows});
    UntfResult r = untf_project(init, learn.constraint, 20000, 1e-8, rng);
    if (!r.converged) {
      throw NotConvergedError("initial operator did not reach the null-space constraint",
                              r.frame_residual, r.row_residual);
    }
    init = std::move(r.op);
  }

  result.initial_objective = objective_l1(init, y.matrix());
  result.baseline_objective = objective_l1(haar_operator(cfg.p), y.matrix());
  result.state = aola(y, init, learn);
  result.final_objective = objective_l1(result.state.op, y.matrix());
  result.cosparsity_y = mean_cosparsity(result.state.op, y.matrix(), 0.01);
  result.cosparsity_x = mean_cosparsity(result.state.op, result.state.signals.matrix(), 0.01);
  spdlog::info("learn-patches: objective {:.6g} -> {:.6g} (Haar {:.6g}), cosparsity {:.2f} -> {:.2f}",
               result.initial_objective, result.final_objective, result.baseline_objective,
               result.cosparsity_y, result.cosparsity_x);
  return result;
}

void write_trace_csv(std::ostream& os, const LearnPatchesResult& result) {
  os << "step,round,objective,baseline_objective\n";
  const auto& trace = result.state.objective_trace;
  const auto& rounds = result.state.trace_round;
  const std::string baseline = format_real(result.baseline_objective);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    os << i << ',' << rounds[i] << ',' << format_real(trace[i]) << ',' << baseline << '\n';
  }
}

// ---------------------------------------------------------------------------
// denoise
// ---------------------------------------------------------------------------

DenoiseConfig parse_denoise(const ConfigDocument& doc) {
  doc.allow_only({"image", "operator", "p", "noise_sigma", "lambda", "gamma", "iters", "trials",
                  "seed"});
  DenoiseConfig cfg;
  cfg.image = doc.path("image");
  cfg.op_spec = doc.string("operator");
  if (cfg.op_spec != "fd" && cfg.op_spec != "haar") cfg.op_spec = doc.path("operator").string();
  cfg.p = doc.integer("p", 8);
  doc.require(cfg.p >= 2, "p", "must be >= 2");
  if (cfg.op_spec == "haar") {
    doc.require((cfg.p & (cfg.p - 1)) == 0, "p", "must be a power of two for the Haar operator");
  }
  cfg.noise_sigma = doc.real("noise_sigma", cfg.noise_sigma);
  doc.require(cfg.noise_sigma >= 0.0, "noise_sigma", "must be >= 0");
  cfg.lambda = doc.real("lambda", cfg.lambda);
  doc.require(cfg.lambda > 0.0, "lambda", "must be > 0");
  cfg.gamma = doc.real("gamma", cfg.gamma);
  doc.require(cfg.gamma > 0.0, "gamma", "must be > 0");
  cfg.iters = static_cast<int>(doc.integer("iters", cfg.iters));
  doc.require(cfg.iters >= 1, "iters", "must be >= 1");
  cfg.trials = static_cast<int>(doc.integer("trials", cfg.trials));
  doc.require(cfg.trials >= 0, "trials", "must be >= 0");
  cfg.seed = doc.seed("seed", 0);
  return cfg;
}

AnalysisOperator load_denoise_operator(const DenoiseConfig& cfg) {
  if (cfg.op_spec == "fd") return fd_operator(cfg.p);
  if (cfg.op_spec == "haar") return haar_operator(cfg.p);
  Matrix w = load_matrix(cfg.op_spec);
  const auto p = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(w.cols()))));
  if (p * p != w.cols()) {
    throw Error(ErrorCode::Io, cfg.op_spec + ": operator width is not a square patch length");
  }
  const double gram = (w.transpose() * w - Matrix::Identity(w.cols(), w.cols())).norm();
  const auto kind = gram <= tol::tight_gram ? AnalysisOperator::Kind::Frame
                                            : AnalysisOperator::Kind::NonTight;
  return AnalysisOperator(std::move(w), kind);
}

DenoiseResult run_denoise(const DenoiseConfig& cfg, const GrayImage& image,
                          const AnalysisOperator& op, int threads) {
  const auto p = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(op.cols()))));
  DenoiseResult result;
  result.rows.resize(static_cast<std::size_t>(cfg.trials));
  std::vector<GrayImage> noisy(result.rows.size());
  std::vector<GrayImage> denoised(result.rows.size());
  parallel_for(result.rows.size(), threads, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = make_stream(cfg.seed, {stream::noise, static_cast<std::uint64_t>(i)});
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix px = image.pixels();
    for (Index c = 0; c < px.cols(); ++c)
      for (Index r = 0; r < px.rows(); ++r) px(r, c) += cfg.noise_sigma * normal(rng);
    noisy[i] = GrayImage(std::move(px));

    const PatchSet patches = extract_patches(noisy[i], p, std::nullopt, true, 0);
    const PatchSet clean = denoise_patches(patches, op, cfg.lambda, cfg.gamma, cfg.iters);
    denoised[i] = reconstruct_overlap(clean, image.height(), image.width());

    DenoiseRow& row = result.rows[i];
    row.trial = static_cast<int>(i);
    row.psnr_noisy = psnr(image, noisy[i]);
    row.psnr_denoised = psnr(image, denoised[i]);
    spdlog::info("denoise trial {}: {:.4f} dB -> {:.4f} dB, {:.2f}s", i, row.psnr_noisy,
                 row.psnr_denoised, elapsed_seconds(start));
  });
  if (!noisy.empty()) {
    result.first_noisy = std::move(noisy.front());
    result.first_denoised = std::move(denoised.front());
  }
  return result;
}

void write_denoise_csv(std::ostream& os, const std::vector<DenoiseRow>& rows) {
  os << "trial,psnr_noisy,psnr_denoised\n";
  for (const auto& r : rows) {
    os << r.trial << ',' << format_real(r.psnr_noisy) << ',' << format_real(r.psnr_denoised)
       << '\n';
  }
}

// ---------------------------------------------------------------------------
// Command dispatch
// ---------------------------------------------------------------------------

namespace {

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir_.string() + ": " + ec.message());
  }

  std::filesystem::path file(const std::string& name) {
    files_.push_back(name);
    const std::filesystem::path p = dir_ / name;
    std::filesystem::create_directories(p.parent_path());
    return p;
  }

  std::ofstream open(const std::string& name) {
    const std::filesystem::path p = file(name);
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + p.string() + " for writing");
    return os;
  }

  void write_manifest(const std::string& command, const ConfigDocument& doc,
                      std::uint64_t seed) {
    std::vector<std::string> files = files_;
    std::sort(files.begin(), files.end());
    ordered_json m;
    m["schema_version"] = kSchemaVersion;
    m["command"] = command;
    m["seed"] = seed;
    m["config"] = doc.json();
    m["files"] = files;
    std::ofstream os(dir_ / "manifest.json", std::ios::binary);
    if (!os) throw Error(ErrorCode::Io, "cannot write manifest in " + dir_.string());
    os << m.dump(2) << '\n';
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

std::uint64_t seed_of(const ConfigDocument& doc, const CommandOptions& opts) {
  return opts.seed ? *opts.seed : doc.seed("seed", 0);
}

GrayImage load_image(const std::filesystem::path& path) { return read_pgm(path); }

void cmd_recover_synthetic(const ConfigDocument& doc, const CommandOptions& opts,
                           OutputDir& out) {
  RecoverSyntheticConfig cfg = parse_recover_synthetic(doc);
  cfg.seed = seed_of(doc, opts);
  const auto rows = run_recover_synthetic(cfg, opts.threads);
  auto os = out.open("recovery.csv");
  write_recovery_csv(os, rows);
  out.write_manifest(opts.command, doc, cfg.seed);
}

void cmd_identifiability(const ConfigDocument& doc, const CommandOptions& opts, OutputDir& out) {
  IdentifiabilityConfig cfg = parse_identifiability(doc);
  cfg.seed = seed_of(doc, opts);
  const auto rows = run_identifiability(cfg, opts.threads);
  {
    auto os = out.open("identifiability.csv");
    write_identifiability_csv(os, rows);
  }
  {
    auto os = out.open("identifiability_summary.json");
    os << identifiability_summary_json(rows) << '\n';
  }
  for (const auto& r : rows) {
    auto os = out.open("samples/q" + std::to_string(r.q) + "_op" + std::to_string(r.op_index) +
                       ".csv");
    write_report_csv(os, r.report);
  }
  out.write_manifest(opts.command, doc, cfg.seed);
}

void cmd_learn_patches(const ConfigDocument& doc, const CommandOptions& opts, OutputDir& out) {
  LearnPatchesConfig cfg = parse_learn_patches(doc);
  cfg.seed = seed_of(doc, opts);
  const GrayImage image = load_image(cfg.image);
  if (cfg.p > std::min(image.height(), image.width())) {
    doc.fail("p", "exceeds the image size");
  }
  const LearnPatchesResult result = run_learn_patches(cfg, image);
  save_matrix(out.file("operator.txt"), result.state.op.matrix());
  {
    auto os = out.open("trace.csv");
    write_trace_csv(os, result);
  }
  save_checkpoint(out.file("checkpoint.txt"), result.state, result.learn);
  {
    ordered_json s;
    s["schema_version"] = kSchemaVersion;
    s["initial_objective"] = result.initial_objective;
    s["final_objective"] = result.final_objective;
    s["baseline_objective"] = result.baseline_objective;
    s["mean_cosparsity_y"] = result.cosparsity_y;
    s["mean_cosparsity_x"] = result.cosparsity_x;
    s["outer_iterations"] = result.state.outer_iterations;
    s["inner_iterations"] = result.state.inner_iterations;
    s["drs_iterations"] = result.state.drs_iterations;
    s["stalled"] = result.state.stalled;
    auto os = out.open("summary.json");
    os << s.dump(2) << '\n';
  }
  out.write_manifest(opts.command, doc, cfg.seed);
}

void cmd_denoise(const ConfigDocument& doc, const CommandOptions& opts, OutputDir& out) {
  DenoiseConfig cfg = parse_denoise(doc);
  cfg.seed = seed_of(doc, opts);
  const GrayImage image = load_image(cfg.image);
  const AnalysisOperator op = load_denoise_operator(cfg);
  const DenoiseResult result = run_denoise(cfg, image, op, opts.threads);
  {
    auto os = out.open("metrics.csv");
    write_denoise_csv(os, result.rows);
  }
  if (!result.rows.empty()) {
    write_pgm(out.file("noisy.pgm"), result.first_noisy);
    write_pgm(out.file("denoised.pgm"), result.first_denoised);
  }
  out.write_manifest(opts.command, doc, cfg.seed);
}

void cmd_phantom(const ConfigDocument& doc, const CommandOptions& opts, OutputDir& out) {
  doc.allow_only({"size", "seed"});
  const Index size = doc.integer("size", 128);
  doc.require(size >= 2, "size", "must be >= 2");
  write_pgm(out.file("phantom.pgm"), shepp_logan(size));
  out.write_manifest(opts.command, doc, seed_of(doc, opts));
}

}  // namespace

int run_command(const CommandOptions& opts) {
  try {
    const ConfigDocument doc = ConfigDocument::load(opts.config);
    OutputDir out(opts.out);
    const auto start = std::chrono::steady_clock::now();
    if (opts.command == "recover-synthetic") {
      cmd_recover_synthetic(doc, opts, out);
    } else if (opts.command == "identifiability") {
      cmd_identifiability(doc, opts, out);
    } else if (opts.command == "learn-patches") {
      cmd_learn_patches(doc, opts, out);
    } else if (opts.command == "denoise") {
      cmd_denoise(doc, opts, out);
    } else if (opts.command == "phantom") {
      cmd_phantom(doc, opts, out);
    } else {
      spdlog::error("unknown command '{}'", opts.command);
      return 2;
    }
    spdlog::info("{} finished, wall_time {:.3f}s", opts.command, elapsed_seconds(start));
    return 0;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return is_numerical(e.code()) ? 3 : 2;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 3;
  }
}

}  // namespace aol
