#include "shoesplat/logging.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace shoesplat {

void init_logging() {
  static const bool once = [] {
    auto logger = spdlog::stderr_color_mt("shoesplat");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv(kLogLevelEnv)) {
      spdlog::set_level(spdlog::level::from_str(env));
    }
    return true;
  }();
  (void)once;
}

}  // namespace shoesplat
