#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "aol/checkpoint.hpp"
#include "aol/config.hpp"
#include "aol/datagen.hpp"
#include "aol/experiments.hpp"
#include "aol/matrix_io.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aol;
using aol::test::gaussian;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_recover_synthetic(ConfigDocument::parse(text, "cfg.json"));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("matrix text round trip is exact") {
  Matrix m = gaussian(7, 5, 1);
  m(0, 0) = 1e-300;
  m(1, 0) = -0.1;
  m(2, 0) = 123456789.0123456789;
  std::stringstream ss;
  write_matrix(ss, m);
  CHECK(read_matrix(ss) == m);

  std::stringstream empty;
  write_matrix(empty, Matrix(0, 3));
  CHECK(read_matrix(empty).cols() == 3);

  std::stringstream truncated("2 2\n1 2\n3\n");
  CHECK_THROWS_AS(read_matrix(truncated), Error);
  std::stringstream bad("1 2\n1 x\n");
  CHECK_THROWS_AS(read_matrix(bad), Error);
}

TEST_CASE("format_real") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.95, 42.0}) {
    CHECK(std::stod(format_real(v)) == v);
  }
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("checkpoint round trip") {
  const AnalysisOperator op = random_untf(12, 8, 2);
  const Matrix y = sample_cosparse(op, 3, 30, 3).matrix() + 0.01 * gaussian(8, 30, 4);
  LearnConfig cfg;
  cfg.outer_iters = 2;
  cfg.k_max_inner = 20;
  cfg.k_max_drs = 50;
  cfg.eta0 = 0.01;
  cfg.constraint = Constraint::with_null_space(NullSpaceBasis::constant(8));
  cfg.allow_general_inverse = true;
  const LearnState s = aola(SignalMatrix(y), random_untf(12, 8, 5), cfg);

  std::stringstream ss;
  write_checkpoint(ss, s, cfg);
  LearnConfig back_cfg;
  const LearnState back = read_checkpoint(ss, &back_cfg);
  CHECK(back.op.matrix() == s.op.matrix());
  CHECK(back.op.row_norm_target() == s.op.row_norm_target());
  CHECK(back.signals.matrix() == s.signals.matrix());
  CHECK(back.dual == s.dual);
  CHECK(back.codes == s.codes);
  CHECK(back.objective_trace == s.objective_trace);
  CHECK(back.trace_round == s.trace_round);
  CHECK(back.outer_iterations == s.outer_iterations);
  CHECK(back.inner_iterations == s.inner_iterations);
  CHECK(back_cfg.eta0 == cfg.eta0);
  CHECK(back_cfg.constraint.null_rank() == 1);

  std::stringstream junk("{\"hello\": 1}\n");
  CHECK_THROWS_AS(read_checkpoint(junk), Error);
}

TEST_CASE("config errors point at the offending line") {
  const std::string ok = "{\n  \"q_list\": [6],\n  \"gamma_list\": [0]\n}\n";
  CHECK(config_error(ok).empty());

  const std::string typo = "{\n  \"q_list\": [6],\n  \"gamma_list\": [0],\n  \"itres\": 5\n}\n";
  const std::string e1 = config_error(typo);
  CHECK(e1.find("cfg.json:4") != std::string::npos);
  CHECK(e1.find("itres") != std::string::npos);

  const std::string wrong_type = "{\n  \"q_list\": [6],\n  \"gamma_list\": [0],\n  \"trials\": \"x\"\n}\n";
  CHECK(config_error(wrong_type).find("cfg.json:4") != std::string::npos);

  CHECK(config_error("{\n  \"gamma_list\": [0]\n}\n").find("q_list") != std::string::npos);
  CHECK(config_error("{\n  \"q_list\": [6],\n").find("cfg.json:") != std::string::npos);

  const ConfigDocument doc = ConfigDocument::parse("{\"g\": [\"inf\", 1.5]}");
  const auto g = doc.real_or_inf_list("g");
  CHECK(std::isinf(g[0]));
  CHECK(g[1] == 1.5);
}
