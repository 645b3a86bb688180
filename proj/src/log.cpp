#include "latticebands/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <mutex>

namespace lb::log {

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> lg;
  std::call_once(once, [] {
    lg = spdlog::stderr_color_mt("latticebands");
    lg->set_pattern("[%l] %v");
    spdlog::level::level_enum lvl = spdlog::level::warn;
    if (const char* env = std::getenv("LATTICEBANDS_LOG")) {
      const auto parsed = spdlog::level::from_str(env);
      // from_str maps unknown names to off
      if (parsed != spdlog::level::off || std::string(env) == "off") lvl = parsed;
    }
    lg->set_level(lvl);
  });
  return lg;
}

}  // namespace

void init() { logger(); }
void debug(const std::string& msg) { logger()->debug(msg); }
void info(const std::string& msg) { logger()->info(msg); }
void warn(const std::string& msg) { logger()->warn(msg); }
void error(const std::string& msg) { logger()->error(msg); }

}  // namespace lb::log
