#include "bugsum/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace bugsum {

LogLevel log_threshold() {
    static const LogLevel level = [] {
        const char* env = std::getenv("BUGSUM_LOG");
        if (!env) return LogLevel::error;
        std::string v(env);
        if (v == "debug") return LogLevel::debug;
        if (v == "info") return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

void log(LogLevel level, std::string_view msg) {
    if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
    const char* tag = level == LogLevel::error ? "error"
                    : level == LogLevel::info  ? "info"
                                               : "debug";
    std::cerr << "[" << tag << "] " << msg << "\n";
}

} // namespace bugsum
