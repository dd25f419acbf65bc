#include "rehearse/time.hpp"

#include "rehearse/error.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>

namespace rehearse {

bool overlaps(const TimeRange& a, const TimeRange& b) {
    if (a.empty() && b.empty()) return a.start_ms == b.start_ms;
    if (a.empty()) return b.start_ms <= a.start_ms && a.start_ms < b.end_ms;
    if (b.empty()) return a.start_ms <= b.start_ms && b.start_ms < a.end_ms;
    return std::max(a.start_ms, b.start_ms) < std::min(a.end_ms, b.end_ms);
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto secs = floor<seconds>(t);
    const auto millis = (t - secs).count();
    const std::time_t raw = system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&raw, &tm);
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(millis));
    return buffer;
}

Timestamp parse_timestamp(const std::string& text) {
    int year, month, day, hour, minute, second, millis = 0;
    char tail = 0;
    const int fields = std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3d%c", &year, &month,
                                   &day, &hour, &minute, &second, &millis, &tail);
    if (fields != 8 || tail != 'Z' || month < 1 || month > 12 || day < 1 || day > 31 ||
        hour > 23 || minute > 59 || second > 60) {
        throw InvalidArgument("bad timestamp: " + text);
    }
    using namespace std::chrono;
    const sys_days date = year_month_day{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                                         std::chrono::day{unsigned(day)}};
    return time_point_cast<milliseconds>(date) + hours{hour} + minutes{minute} + seconds{second} +
           milliseconds{millis};
}

Timestamp SystemClock::now() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

Timestamp ManualClock::now() {
    std::lock_guard lock(mutex_);
    const auto value = current_;
    current_ += step_;
    return value;
}

}  // namespace rehearse
