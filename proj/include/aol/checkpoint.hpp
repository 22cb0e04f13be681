#pragma once

#include <filesystem>
#include <iosfwd>

#include "aol/learning.hpp"

namespace aol {

// LearnState checkpoint: one line of JSON (counters, config echo, objective
// trace), then the operator, signals, dual, codes and the prescribed
// null-space basis (n x 0 when there is none) in the plain matrix format.
void write_checkpoint(std::ostream& os, const LearnState& state, const LearnConfig& cfg);
LearnState read_checkpoint(std::istream& is, LearnConfig* cfg = nullptr);

void save_checkpoint(const std::filesystem::path& path, const LearnState& state,
                     const LearnConfig& cfg);
LearnState load_checkpoint(const std::filesystem::path& path, LearnConfig* cfg = nullptr);

}  // namespace aol
