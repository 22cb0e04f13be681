#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aol/config.hpp"
#include "aol/identifiability.hpp"
#include "aol/imaging.hpp"
#include "aol/learning.hpp"

namespace aol {

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// recover-synthetic
// ---------------------------------------------------------------------------

struct RecoverSyntheticConfig {
  Index a = 24;
  Index n = 16;
  Index l = 768;
  std::vector<Index> q_list;
  std::vector<double> gamma_list;  // +infinity for a random start
  int trials = 1;
  int iters = 50000;
  // Initial step: eta0 if set, otherwise eta0_per_sample / l. The subgradient
  // grows linearly with l, so the per-sample form keeps the step comparable
  // across training-set sizes.
  std::optional<double> eta0;
  double eta0_per_sample = 0.4;
  double rho = 0.98;
  double eps = 1e-10;
  std::uint64_t seed = 0;

  double initial_step() const;
};

struct RecoveryRow {
  Index q = 0;
  double gamma = 0.0;
  int trial = 0;
  double recovery_rate = 0.0;
  double initial_recovery_rate = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  bool stalled = false;
  bool monotone = true;  // no accepted step increased the objective
};

RecoverSyntheticConfig parse_recover_synthetic(const ConfigDocument& doc);
// One noiseless operator update per (q, gamma, trial). The reference
// operator and training data depend on (q, trial) only and the perturbation
// direction on the trial only, so gammas are compared on identical problems.
// Rows come back sorted by (q, gamma, trial).
std::vector<RecoveryRow> run_recover_synthetic(const RecoverSyntheticConfig& cfg, int threads = 1);
void write_recovery_csv(std::ostream& os, const std::vector<RecoveryRow>& rows);

// ---------------------------------------------------------------------------
// identifiability
// ---------------------------------------------------------------------------

struct IdentifiabilityConfig {
  Index a = 24;
  Index n = 16;
  Index l = 96;
  std::vector<Index> q_list;
  Index samples = 1000;
  int operators = 10;
  double zero_tol = 1e-10;
  std::uint64_t seed = 0;
};

struct IdentifiabilityRow {
  Index q = 0;
  int op_index = 0;
  ConditionReport report;
  Index dominance_violations = 0;  // samples with theorem 1 but not lemma 3
};

IdentifiabilityConfig parse_identifiability(const ConfigDocument& doc);
std::vector<IdentifiabilityRow> run_identifiability(const IdentifiabilityConfig& cfg,
                                                    int threads = 1);
void write_identifiability_csv(std::ostream& os, const std::vector<IdentifiabilityRow>& rows);
std::string identifiability_summary_json(const std::vector<IdentifiabilityRow>& rows);

// ---------------------------------------------------------------------------
// learn-patches
// ---------------------------------------------------------------------------

struct LearnPatchesConfig {
  std::filesystem::path image;
  Index p = 8;
  Index l = 2048;
  Index a = 128;
  bool dc_null_space = false;  // constraint "dc": the constant patch is in the kernel
  bool mean_remove = true;
  bool edge_patches = true;    // only patches with edges, plus one constant patch
  bool noiseless = true;
  double noise_sigma = 0.0;    // Gaussian noise added to the training image first
  double lambda = 0.5;
  double gamma = 0.5;
  std::optional<double> eta0;  // as in RecoverSyntheticConfig
  double eta0_per_sample = 0.4;
  double rho = 0.98;
  double eps = 1e-10;
  int outer_iters = 10;
  int inner_iters = 20000;
  int drs_iters = 1000;
  std::uint64_t seed = 0;

  double initial_step() const;
};

struct LearnPatchesResult {
  LearnState state;
  LearnConfig learn;
  PatchSet patches;
  double baseline_objective = 0.0;  // two-times overcomplete Haar on the same patches
  double initial_objective = 0.0;
  double final_objective = 0.0;     // ||W X||_1 of the returned operator on the training patches
  double cosparsity_y = 0.0;        // mean cosparsity (tol 0.01) of the training patches
  double cosparsity_x = 0.0;        // same for the returned signals
};

LearnPatchesConfig parse_learn_patches(const ConfigDocument& doc);
LearnPatchesResult run_learn_patches(const LearnPatchesConfig& cfg, const GrayImage& image);
// step,round,objective,baseline_objective
void write_trace_csv(std::ostream& os, const LearnPatchesResult& result);

// ---------------------------------------------------------------------------
// denoise
// ---------------------------------------------------------------------------

struct DenoiseConfig {
  std::filesystem::path image;
  std::string op_spec;  // "fd", "haar" or a matrix file path
  Index p = 8;          // patch size for fd/haar; inferred from a matrix file
  double noise_sigma = 10.0;
  double lambda = 0.1;
  double gamma = 0.5;
  int iters = 1000;
  int trials = 1;
  std::uint64_t seed = 0;
};

struct DenoiseRow {
  int trial = 0;
  double psnr_noisy = 0.0;
  double psnr_denoised = 0.0;
};

struct DenoiseResult {
  std::vector<DenoiseRow> rows;
  GrayImage first_noisy;
  GrayImage first_denoised;
};

DenoiseConfig parse_denoise(const ConfigDocument& doc);
// Loads fd/haar or a matrix file (square patch length required).
AnalysisOperator load_denoise_operator(const DenoiseConfig& cfg);
DenoiseResult run_denoise(const DenoiseConfig& cfg, const GrayImage& image,
                          const AnalysisOperator& op, int threads = 1);
void write_denoise_csv(std::ostream& os, const std::vector<DenoiseRow>& rows);

// ---------------------------------------------------------------------------
// Command dispatch
// ---------------------------------------------------------------------------

struct CommandOptions {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

// Runs one command and writes its artifacts plus manifest.json into out.
// Returns the process exit code: 0 success, 2 config or input error,
// 3 numerical failure.
int run_command(const CommandOptions& opts);

// Reads AOL_LOG (trace, debug, info, warn, error, off) and installs a
// stderr logger.
void init_logging();

}  // namespace aol
