#pragma once

#include <string_view>

namespace dsner {

// Verbosity comes from the DSNER_LOG environment variable: quiet, warn
// (default), info or debug. Messages go to stderr.
enum class LogLevel { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level();
void set_log_level(LogLevel level);

void log_warn(std::string_view msg);
void log_info(std::string_view msg);
void log_debug(std::string_view msg);

}  // namespace dsner
