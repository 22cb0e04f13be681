#include "aol/checkpoint.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "aol/matrix_io.hpp"
#include "json.hpp"

namespace aol {

using nlohmann::json;

void write_checkpoint(std::ostream& os, const LearnState& state, const LearnConfig& cfg) {
  json header;
  header["format"] = "aol-checkpoint";
  header["version"] = 1;
  header["outer_iterations"] = state.outer_iterations;
  header["inner_iterations"] = state.inner_iterations;
  header["drs_iterations"] = state.drs_iterations;
  header["stalled"] = state.stalled;
  header["row_norm_target"] = state.op.row_norm_target();
  header["config"] = {
      {"lambda", cfg.lambda},
      {"gamma", cfg.gamma},
      {"eta0", cfg.eta0},
      {"rho", cfg.rho},
      {"eps", cfg.eps},
      {"eta_min", cfg.eta_min},
      {"k_max_inner", cfg.k_max_inner},
      {"k_max_drs", cfg.k_max_drs},
      {"outer_iters", cfg.outer_iters},
      {"seed", cfg.seed},
      {"noiseless", cfg.noiseless},
      {"null_space_rank", cfg.constraint.null_rank()},
  };
  header["objective_trace"] = state.objective_trace;
  header["trace_round"] = state.trace_round;
  os << header.dump() << '\n';
  write_matrix(os, state.op.matrix());
  write_matrix(os, state.signals.matrix());
  write_matrix(os, state.dual);
  write_matrix(os, state.codes);
  write_matrix(os, cfg.constraint.has_null_space() ? cfg.constraint.null_space->basis()
                                                   : Matrix(state.op.cols(), 0));
}

LearnState read_checkpoint(std::istream& is, LearnConfig* cfg) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::Io, "empty checkpoint");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("bad checkpoint header: ") + e.what());
  }
  if (header.value("format", "") != "aol-checkpoint") {
    throw Error(ErrorCode::Io, "not an aol checkpoint");
  }
  LearnState state;
  try {
    state.outer_iterations = header.at("outer_iterations").get<int>();
    state.inner_iterations = header.at("inner_iterations").get<int>();
    state.drs_iterations = header.at("drs_iterations").get<int>();
    state.stalled = header.at("stalled").get<bool>();
    state.objective_trace = header.at("objective_trace").get<std::vector<double>>();
    state.trace_round = header.at("trace_round").get<std::vector<int>>();
    const double c = header.at("row_norm_target").get<double>();
    state.op = AnalysisOperator(read_matrix(is), c);
    if (cfg != nullptr) {
      const json& jc = header.at("config");
      cfg->lambda = jc.at("lambda").get<double>();
      cfg->gamma = jc.at("gamma").get<double>();
      cfg->eta0 = jc.at("eta0").get<double>();
      cfg->rho = jc.at("rho").get<double>();
      cfg->eps = jc.at("eps").get<double>();
      cfg->eta_min = jc.at("eta_min").get<double>();
      cfg->k_max_inner = jc.at("k_max_inner").get<int>();
      cfg->k_max_drs = jc.at("k_max_drs").get<int>();
      cfg->outer_iters = jc.at("outer_iters").get<int>();
      cfg->seed = jc.at("seed").get<std::uint64_t>();
      cfg->noiseless = jc.at("noiseless").get<bool>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("bad checkpoint header: ") + e.what());
  }
  state.signals = SignalMatrix(read_matrix(is));
  state.dual = read_matrix(is);
  state.codes = read_matrix(is);
  const Matrix null_basis = read_matrix(is);
  if (cfg != nullptr) {
    cfg->constraint = null_basis.cols() > 0
                          ? Constraint::with_null_space(NullSpaceBasis(null_basis))
                          : Constraint::untf();
  }
  return state;
}

void save_checkpoint(const std::filesystem::path& path, const LearnState& state,
                     const LearnConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_checkpoint(os, state, cfg);
}

LearnState load_checkpoint(const std::filesystem::path& path, LearnConfig* cfg) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_checkpoint(is, cfg);
}

}  // namespace aol
