#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aol/error.hpp"
#include "json.hpp"

namespace aol {

// A JSON experiment config that remembers its source text so that errors
// can point at a line: "<file>:<line>: <message>". All failures are thrown
// as Error with ErrorCode::Config.
class ConfigDocument {
 public:
  static ConfigDocument load(const std::filesystem::path& path);
  static ConfigDocument parse(std::string text, std::string name = "<config>");

  const nlohmann::json& json() const { return json_; }
  const std::string& name() const { return name_; }
  // Directory relative paths in the config are resolved against.
  const std::filesystem::path& base_dir() const { return base_dir_; }

  bool has(std::string_view key) const;
  // 1-based line of the first occurrence of "key" in the text, or 0.
  int line_of(std::string_view key) const;
  [[noreturn]] void fail(std::string_view key, const std::string& message) const;

  // Rejects keys outside the given set.
  void allow_only(std::initializer_list<std::string_view> keys) const;

  double real(std::string_view key, std::optional<double> fallback = std::nullopt) const;
  // Accepts a number or one of the strings "inf", "infinity".
  double real_or_inf(const nlohmann::json& value, std::string_view key) const;
  std::int64_t integer(std::string_view key, std::optional<std::int64_t> fallback = std::nullopt) const;
  std::uint64_t seed(std::string_view key, std::uint64_t fallback) const;
  bool boolean(std::string_view key, std::optional<bool> fallback = std::nullopt) const;
  std::string string(std::string_view key, std::optional<std::string> fallback = std::nullopt) const;
  std::vector<std::int64_t> integer_list(std::string_view key,
                                         std::optional<std::vector<std::int64_t>> fallback =
                                             std::nullopt) const;
  std::vector<double> real_or_inf_list(std::string_view key,
                                       std::optional<std::vector<double>> fallback =
                                           std::nullopt) const;
  // string() resolved against base_dir() when relative.
  std::filesystem::path path(std::string_view key) const;

  // Throws with the key's line unless ok.
  void require(bool ok, std::string_view key, const std::string& message) const;

 private:
  const nlohmann::json* find(std::string_view key) const;

  std::string name_;
  std::string text_;
  std::filesystem::path base_dir_;
  nlohmann::json json_;
};

}  // namespace aol
