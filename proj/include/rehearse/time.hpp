#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <string>

namespace rehearse {

/// Half-open interval [start_ms, end_ms) on a session timeline. A range with
/// start_ms == end_ms denotes a single instant.
struct TimeRange {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;

    std::int64_t duration() const { return end_ms - start_ms; }
    bool empty() const { return start_ms == end_ms; }
    bool valid() const { return start_ms >= 0 && start_ms <= end_ms; }

    friend bool operator==(const TimeRange&, const TimeRange&) = default;
    friend auto operator<=>(const TimeRange&, const TimeRange&) = default;
};

/// True when the two ranges share time. Instants intersect a range that
/// contains them (start inclusive, end exclusive) and equal instants.
bool overlaps(const TimeRange& a, const TimeRange& b);

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// "YYYY-MM-DDTHH:MM:SS.mmmZ"
std::string format_timestamp(Timestamp t);
/// Accepts the format produced by format_timestamp; throws InvalidArgument.
Timestamp parse_timestamp(const std::string& text);

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() override;
};

/// Starts at a fixed instant and advances by `step` on every read.
class ManualClock final : public Clock {
public:
    explicit ManualClock(Timestamp start,
                         std::chrono::milliseconds step = std::chrono::milliseconds{1000})
        : current_(start), step_(step) {}

    Timestamp now() override;

private:
    std::mutex mutex_;
    Timestamp current_;
    std::chrono::milliseconds step_;
};

}  // namespace rehearse
