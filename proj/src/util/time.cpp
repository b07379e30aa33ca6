#include "fedlibre/util/time.hpp"

#include <array>
#include <cstdio>

namespace fedlibre {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
constexpr long long days_from_civil(long long y, unsigned m, unsigned d)
{
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

struct Civil {
    long long year;
    unsigned month;
    unsigned day;
};

constexpr Civil civil_from_days(long long z)
{
    z += 719468;
    const long long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long long y = static_cast<long long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

bool is_leap(long long y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(long long y, unsigned m)
{
    static constexpr std::array<unsigned, 12> table{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : table[m - 1];
}

std::optional<int> digits(std::string_view s, std::size_t pos, std::size_t count)
{
    if (pos + count > s.size())
        return std::nullopt;
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (s[i] < '0' || s[i] > '9')
            return std::nullopt;
        value = value * 10 + (s[i] - '0');
    }
    return value;
}

constexpr long long kSecondsPerDay = 86400;

} // namespace

Timestamp make_utc(int year, unsigned month, unsigned day, int hour, int minute, int second)
{
    const long long days = days_from_civil(year, month, day);
    return Timestamp{std::chrono::seconds{days * kSecondsPerDay + hour * 3600LL + minute * 60LL + second}};
}

std::optional<Timestamp> parse_utc(std::string_view text, Granularity* found)
{
    // YYYY-MM-DD
    if (text.size() != 10 && text.size() != 20)
        return std::nullopt;
    auto y = digits(text, 0, 4);
    auto mo = digits(text, 5, 2);
    auto d = digits(text, 8, 2);
    if (!y || !mo || !d || text[4] != '-' || text[7] != '-')
        return std::nullopt;
    if (*mo < 1 || *mo > 12 || *d < 1 || static_cast<unsigned>(*d) > days_in_month(*y, *mo))
        return std::nullopt;
    if (text.size() == 10) {
        if (found)
            *found = Granularity::Day;
        return make_utc(*y, *mo, *d);
    }
    auto h = digits(text, 11, 2);
    auto mi = digits(text, 14, 2);
    auto s = digits(text, 17, 2);
    if (text[10] != 'T' || text[13] != ':' || text[16] != ':' || text[19] != 'Z' || !h || !mi || !s)
        return std::nullopt;
    if (*h > 23 || *mi > 59 || *s > 59)
        return std::nullopt;
    if (found)
        *found = Granularity::Second;
    return make_utc(*y, *mo, *d, *h, *mi, *s);
}

std::string format_utc(Timestamp ts, Granularity granularity)
{
    const long long total = ts.time_since_epoch().count();
    long long days = total / kSecondsPerDay;
    long long rem = total % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --days;
    }
    const Civil c = civil_from_days(days);
    char buf[32];
    if (granularity == Granularity::Day) {
        std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", c.year, c.month, c.day);
    } else {
        std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", c.year, c.month, c.day,
                      rem / 3600, (rem / 60) % 60, rem % 60);
    }
    return buf;
}

std::string format_rfc822(Timestamp ts)
{
    static constexpr std::array<const char*, 7> weekdays{"Thu", "Fri", "Sat", "Sun", "Mon", "Tue", "Wed"};
    static constexpr std::array<const char*, 12> months{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                        "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    const long long total = ts.time_since_epoch().count();
    long long days = total / kSecondsPerDay;
    long long rem = total % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --days;
    }
    const Civil c = civil_from_days(days);
    const long long wd = ((days % 7) + 7) % 7;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s, %02u %s %04lld %02lld:%02lld:%02lld GMT", weekdays[wd], c.day,
                  months[c.month - 1], c.year, rem / 3600, (rem / 60) % 60, rem % 60);
    return buf;
}

Timestamp floor_to_day(Timestamp ts)
{
    const long long total = ts.time_since_epoch().count();
    long long days = total / kSecondsPerDay;
    if (total % kSecondsPerDay < 0)
        --days;
    return Timestamp{std::chrono::seconds{days * kSecondsPerDay}};
}

Timestamp SystemClock::now() const
{
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

} // namespace fedlibre
