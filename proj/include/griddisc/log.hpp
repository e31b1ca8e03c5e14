#pragma once

#include <sstream>
#include <string>
#include <string_view>

namespace griddisc {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

void set_log_level(LogLevel level);
// Accepts "error", "warn", "info", "debug"; throws ConfigError otherwise.
void set_log_level(std::string_view name);
LogLevel log_level();

// One line per event on standard error.
void log_line(LogLevel level, const std::string& msg);

namespace detail {
inline void stream_all(std::ostringstream&) {}
template <typename T, typename... Rest>
void stream_all(std::ostringstream& os, const T& v, const Rest&... rest) {
    os << v;
    stream_all(os, rest...);
}
} // namespace detail

template <typename... Args>
void logf(LogLevel level, const Args&... args) {
    if (level > log_level()) return;
    std::ostringstream os;
    detail::stream_all(os, args...);
    log_line(level, os.str());
}

#define GD_LOG_ERROR(...) ::griddisc::logf(::griddisc::LogLevel::error, __VA_ARGS__)
#define GD_LOG_WARN(...) ::griddisc::logf(::griddisc::LogLevel::warn, __VA_ARGS__)
#define GD_LOG_INFO(...) ::griddisc::logf(::griddisc::LogLevel::info, __VA_ARGS__)
#define GD_LOG_DEBUG(...) ::griddisc::logf(::griddisc::LogLevel::debug, __VA_ARGS__)

} // namespace griddisc
