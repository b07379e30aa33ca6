#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace fedlibre {

/// UTC instant at one-second resolution. Every datestamp in the system uses it.
using Timestamp = std::chrono::sys_seconds;

enum class Granularity { Day, Second };

/// Parses "YYYY-MM-DD" or "YYYY-MM-DDThh:mm:ssZ". The granularity actually
/// present is written to `found` when non-null.
std::optional<Timestamp> parse_utc(std::string_view text, Granularity* found = nullptr);

std::string format_utc(Timestamp ts, Granularity granularity = Granularity::Second);

/// RFC 822 date as used by RSS 2.0, always in GMT.
std::string format_rfc822(Timestamp ts);

Timestamp make_utc(int year, unsigned month, unsigned day, int hour = 0, int minute = 0, int second = 0);

Timestamp floor_to_day(Timestamp ts);

/// Source of "now". Tests and the CLI's --now flag pin it.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override;
};

class FixedClock final : public Clock {
public:
    explicit FixedClock(Timestamp t) : now_(t) {}
    Timestamp now() const override { return now_; }
    void set(Timestamp t) { now_ = t; }
    void advance(std::chrono::seconds by) { now_ += by; }

private:
    Timestamp now_;
};

} // namespace fedlibre
