#pragma once

#include <string_view>

namespace bugsum {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Threshold from $BUGSUM_LOG (error|info|debug); default error.
LogLevel log_threshold();

void log(LogLevel level, std::string_view msg);

inline void log_info(std::string_view msg) { log(LogLevel::info, msg); }
inline void log_debug(std::string_view msg) { log(LogLevel::debug, msg); }
inline void log_error(std::string_view msg) { log(LogLevel::error, msg); }

} // namespace bugsum
