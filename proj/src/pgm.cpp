#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "aol/imaging.hpp"

namespace aol {

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& is) {
  std::string tok;
  int ch;
  while ((ch = is.get()) != EOF) {
    if (ch == '#') {
      while ((ch = is.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

Index header_number(std::istream& is, const std::filesystem::path& path) {
  const std::string tok = header_token(is);
  try {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Io, path.string() + ": bad PGM header field '" + tok + "'");
  }
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  if (header_token(is) != "P5") throw Error(ErrorCode::Io, path.string() + ": not a binary PGM");
  const Index w = header_number(is, path);
  const Index h = header_number(is, path);
  const Index maxval = header_number(is, path);
  if (maxval > 255) throw Error(ErrorCode::Io, path.string() + ": only 8-bit PGM is supported");

  std::vector<unsigned char> raw(static_cast<std::size_t>(w * h));
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (is.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw Error(ErrorCode::Io, path.string() + ": truncated pixel data");
  }
  Matrix px(h, w);
  for (Index r = 0; r < h; ++r)
    for (Index c = 0; c < w; ++c) px(r, c) = raw[static_cast<std::size_t>(r * w + c)];
  return GrayImage(std::move(px));
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  os << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> raw(static_cast<std::size_t>(img.width() * img.height()));
  for (Index r = 0; r < img.height(); ++r) {
    for (Index c = 0; c < img.width(); ++c) {
      const double v = std::clamp(std::round(img.pixels()(r, c)), 0.0, 255.0);
      raw[static_cast<std::size_t>(r * img.width() + c)] = static_cast<unsigned char>(v);
    }
  }
  os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!os) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace aol
