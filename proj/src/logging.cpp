#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <string>

#include "aol/experiments.hpp"

namespace aol {

void init_logging() {
  auto logger = spdlog::stderr_color_mt("aol");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("AOL_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept that for "off" itself.
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("AOL_LOG='{}' is not a log level; using info", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

}  // namespace aol
