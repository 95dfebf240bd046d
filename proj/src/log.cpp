#include "awsgd/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace awsgd {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("AWS_SGD_LOG");
    if (env == nullptr) return LogLevel::error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

void log_line(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const char* tag = level == LogLevel::error ? "error" : (level == LogLevel::info ? "info" : "debug");
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace awsgd
