#pragma once

#include <string>

namespace awsgd {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Level comes from AWS_SGD_LOG (error|info|debug), default error.
LogLevel log_level();
void log_line(LogLevel level, const std::string& msg);

inline void log_info(const std::string& msg) { log_line(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_line(LogLevel::debug, msg); }
inline void log_error(const std::string& msg) { log_line(LogLevel::error, msg); }

}  // namespace awsgd
