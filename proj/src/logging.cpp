#include "intentforge/logging.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "intentforge/error.hpp"

namespace intentforge {

void init_logging(std::string_view fallback) {
  // Logs go to stderr so command output on stdout stays clean.
  if (!spdlog::get("intentforge")) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("intentforge"));
  }
  const char* env = std::getenv("INTENTFORGE_LOG");
  const std::string level = env && *env ? env : std::string(fallback);
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    fail(ErrorKind::Config, "INTENTFORGE_LOG must be error, warn, info or debug, got '" + level + "'");
  }
  spdlog::set_pattern("[%l] %v");
}

}  // namespace intentforge
