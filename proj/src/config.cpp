#include "aol/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace aol {

namespace {

int line_at_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

}  // namespace

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Config, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  ConfigDocument doc = parse(ss.str(), path.string());
  doc.base_dir_ = path.parent_path();
  return doc;
}

ConfigDocument ConfigDocument::parse(std::string text, std::string name) {
  ConfigDocument doc;
  doc.name_ = std::move(name);
  doc.text_ = std::move(text);
  try {
    doc.json_ = nlohmann::json::parse(doc.text_);
  } catch (const nlohmann::json::parse_error& e) {
    // byte is 1-based and points just past the offending character.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw Error(ErrorCode::Config, doc.name_ + ":" + std::to_string(line_at_offset(doc.text_, at)) +
                                       ": invalid JSON (" + e.what() + ")");
  }
  if (!doc.json_.is_object()) {
    throw Error(ErrorCode::Config, doc.name_ + ":1: config must be a JSON object");
  }
  return doc;
}

bool ConfigDocument::has(std::string_view key) const { return find(key) != nullptr; }

const nlohmann::json* ConfigDocument::find(std::string_view key) const {
  const auto it = json_.find(std::string(key));
  return it == json_.end() ? nullptr : &*it;
}

int ConfigDocument::line_of(std::string_view key) const {
  const std::string needle = "\"" + std::string(key) + "\"";
  const std::size_t at = text_.find(needle);
  return at == std::string::npos ? 0 : line_at_offset(text_, at);
}

void ConfigDocument::fail(std::string_view key, const std::string& message) const {
  const int line = line_of(key);
  std::string where = name_;
  if (line > 0) where += ":" + std::to_string(line);
  throw Error(ErrorCode::Config, where + ": field '" + std::string(key) + "' " + message);
}

void ConfigDocument::require(bool ok, std::string_view key, const std::string& message) const {
  if (!ok) fail(key, message);
}

void ConfigDocument::allow_only(std::initializer_list<std::string_view> keys) const {
  for (const auto& [k, v] : json_.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(k, "is not recognized");
  }
}

double ConfigDocument::real(std::string_view key, std::optional<double> fallback) const {
  const nlohmann::json* v = find(key);
  if (v == nullptr) {
    if (!fallback) fail(key, "is required");
    return *fallback;
  }
  if (!v->is_number()) fail(key, "must be a number");
  return v->get<double>();
}

double ConfigDocument::real_or_inf(const nlohmann::json& value, std::string_view key) const {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  fail(key, "entries must be numbers or \"inf\"");
}

std::int64_t ConfigDocument::integer(std::string_view key,
                                     std::optional<std::int64_t> fallback) const {
  const nlohmann::json* v = find(key);
  if (v == nullptr) {
    if (!fallback) fail(key, "is required");
    return *fallback;
  }
  if (!v->is_number_integer()) fail(key, "must be an integer");
  return v->get<std::int64_t>();
}

std::uint64_t ConfigDocument::seed(std::string_view key, std::uint64_t fallback) const {
  const nlohmann::json* v = find(key);
  if (v == nullptr) return fallback;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v->get<std::int64_t>());
  }
  fail(key, "must be a non-negative integer");
}

bool ConfigDocument::boolean(std::string_view key, std::optional<bool> fallback) const {
  const nlohmann::json* v = find(key);
  if (v == nullptr) {
    if (!fallback) fail(key, "is required");
    return *fallback;
  }
  if (!v->is_boolean()) fail(key, "must be true or false");
  return v->get<bool>();
}

std::string ConfigDocument::string(std::string_view key,
                                   std::optional<std::string> fallback) const {
  const nlohmann::json* v = find(key);
  if (v == nullptr) {
    if (!fallback) fail(key, "is required");
    return *fallback;
  }
  if (!v->is_string()) fail(key, "must be a string");
  return v->get<std::string>();
}

std::vector<std::int64_t> ConfigDocument::integer_list(
    std::string_view key, std::optional<std::vector<std::int64_t>> fallback) const {
  const nlohmann::json* v = find(key);
  if (v == nullptr) {
    if (!fallback) fail(key, "is required");
    return *fallback;
  }
  if (!v->is_array()) fail(key, "must be a list of integers");
  std::vector<std::int64_t> out;
  for (const auto& e : *v) {
    if (!e.is_number_integer()) fail(key, "must be a list of integers");
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

std::vector<double> ConfigDocument::real_or_inf_list(
    std::string_view key, std::optional<std::vector<double>> fallback) const {
  const nlohmann::json* v = find(key);
  if (v == nullptr) {
    if (!fallback) fail(key, "is required");
    return *fallback;
  }
  if (!v->is_array()) fail(key, "must be a list");
  std::vector<double> out;
  for (const auto& e : *v) out.push_back(real_or_inf(e, key));
  return out;
}

std::filesystem::path ConfigDocument::path(std::string_view key) const {
  std::filesystem::path p = string(key);
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

}  // namespace aol
