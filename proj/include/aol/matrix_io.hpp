#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "aol/types.hpp"

namespace aol {

// Plain-text matrix format used for operators, signals and patch sets:
//
//   <rows> <cols>
//   v00 v01 ... v0(cols-1)
//   ...
//
// Values are written with 17 significant digits so the round trip is exact.
void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

// Shortest decimal text that reads back to the same double (CSV cells).
std::string format_real(double v);

}  // namespace aol
