#include "dsner/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <string>

namespace dsner {

namespace {

LogLevel level_from_env() {
  const char* env = std::getenv("DSNER_LOG");
  if (!env) return LogLevel::Warn;
  const std::string v(env);
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

std::atomic<int>& current() {
  static std::atomic<int> level{static_cast<int>(level_from_env())};
  return level;
}

void emit(LogLevel at, const char* prefix, std::string_view msg) {
  if (current().load() < static_cast<int>(at)) return;
  std::cerr << prefix << msg << '\n';
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(current().load()); }
void set_log_level(LogLevel level) { current().store(static_cast<int>(level)); }

void log_warn(std::string_view msg) { emit(LogLevel::Warn, "warning: ", msg); }
void log_info(std::string_view msg) { emit(LogLevel::Info, "", msg); }
void log_debug(std::string_view msg) { emit(LogLevel::Debug, "debug: ", msg); }

}  // namespace dsner
