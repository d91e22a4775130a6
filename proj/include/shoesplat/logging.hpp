#pragma once

namespace shoesplat {

/// Environment variable holding the log level
/// (trace, debug, info, warn, error, off). Defaults to info.
inline constexpr const char* kLogLevelEnv = "SHOESPLAT_LOG";

/// Applies the level from the environment. Idempotent.
void init_logging();

}  // namespace shoesplat
