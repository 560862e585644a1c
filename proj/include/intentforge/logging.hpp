#pragma once

#include <string_view>

namespace intentforge {

/// Sets the log level from INTENTFORGE_LOG (error, warn, info, debug), or
/// `fallback` when the variable is unset. An unknown value is a config error.
void init_logging(std::string_view fallback = "info");

}  // namespace intentforge
