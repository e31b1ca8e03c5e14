#include "griddisc/log.hpp"

#include "griddisc/errors.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <mutex>

namespace griddisc {

namespace {
std::atomic<LogLevel> g_level{LogLevel::info};
std::mutex g_mu;

const char* level_name(LogLevel l) {
    switch (l) {
    case LogLevel::error: return "error";
    case LogLevel::warn: return "warn";
    case LogLevel::info: return "info";
    case LogLevel::debug: return "debug";
    }
    return "?";
}
} // namespace

void set_log_level(LogLevel level) { g_level.store(level); }

void set_log_level(std::string_view name) {
    if (name == "error") set_log_level(LogLevel::error);
    else if (name == "warn") set_log_level(LogLevel::warn);
    else if (name == "info") set_log_level(LogLevel::info);
    else if (name == "debug") set_log_level(LogLevel::debug);
    else throw ConfigError("log-level: unknown level '" + std::string(name) + "'");
}

LogLevel log_level() { return g_level.load(); }

void log_line(LogLevel level, const std::string& msg) {
    using namespace std::chrono;
    auto now = system_clock::now();
    auto secs = system_clock::to_time_t(now);
    auto us = duration_cast<microseconds>(now.time_since_epoch()).count() % 1'000'000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char ts[40];
    std::snprintf(ts, sizeof(ts), "%04d-%02d-%02dT%02d:%02d:%02d.%06ldZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<long>(us));
    std::lock_guard<std::mutex> lock(g_mu);
    std::fprintf(stderr, "%s %-5s %s\n", ts, level_name(level), msg.c_str());
}

} // namespace griddisc
