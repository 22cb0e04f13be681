#include "aol/rng.hpp"

#include <vector>

namespace aol {

namespace {

std::vector<std::uint32_t> seed_words(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * path.size());
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto p : path) push(p);
  return words;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  const auto words = seed_words(seed, path);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  Rng rng = make_stream(seed, path);
  return rng();
}

}  // namespace aol
