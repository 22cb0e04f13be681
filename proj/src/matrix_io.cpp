#include "aol/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace aol {

void write_matrix(std::ostream& os, const Matrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  std::string line;
  for (Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      const int len = std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j > 0) line.push_back(' ');
      line.append(buf, static_cast<std::size_t>(len));
    }
    line.push_back('\n');
    os << line;
  }
  if (!os) throw Error(ErrorCode::Io, "failed writing matrix");
}

Matrix read_matrix(std::istream& is) {
  long long rows = -1;
  long long cols = -1;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
    throw Error(ErrorCode::Io, "malformed matrix header (expected \"rows cols\")");
  }
  Matrix m(rows, cols);
  std::string token;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!(is >> token)) {
        throw Error(ErrorCode::Io, "matrix truncated at row " + std::to_string(i) + ", column " +
                                       std::to_string(j));
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw Error(ErrorCode::Io, "bad matrix value \"" + token + "\" at row " +
                                       std::to_string(i) + ", column " + std::to_string(j));
      }
      m(i, j) = v;
    }
  }
  return m;
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_matrix(os, m);
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_matrix(is);
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace aol
