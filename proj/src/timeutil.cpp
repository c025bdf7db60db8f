#include "papageno/timeutil.hpp"

#include <cstdio>

#include "papageno/error.hpp"

namespace papageno {

namespace {

int digits(std::string_view s, std::size_t pos, std::size_t count) {
    if (pos + count > s.size()) throw Error("bad timestamp '" + std::string(s) + "'");
    int v = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (s[i] < '0' || s[i] > '9') throw Error("bad timestamp '" + std::string(s) + "'");
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

std::chrono::sys_days make_day(std::string_view s, int y, int m, int d) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw Error("invalid date in '" + std::string(s) + "'");
    return sys_days{ymd};
}

}  // namespace

Timestamp parse_iso8601(std::string_view s) {
    using namespace std::chrono;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') {
        throw Error("bad timestamp '" + std::string(s) + "'");
    }
    const auto day = make_day(s, digits(s, 0, 4), digits(s, 5, 2), digits(s, 8, 2));
    Timestamp t = time_point_cast<seconds>(day);
    if (s.size() == 10) return t;
    if (s[10] != 'T' && s[10] != ' ') throw Error("bad timestamp '" + std::string(s) + "'");
    std::size_t pos = 11;
    const int hh = digits(s, pos, 2);
    if (pos + 2 >= s.size() || s[pos + 2] != ':') throw Error("bad timestamp '" + std::string(s) + "'");
    const int mm = digits(s, pos + 3, 2);
    pos += 5;
    int ss = 0;
    if (pos < s.size() && s[pos] == ':') {
        ss = digits(s, pos + 1, 2);
        pos += 3;
        if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
            ++pos;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) throw Error("bad time of day in '" + std::string(s) + "'");
    t += hours{hh} + minutes{mm} + seconds{ss};
    if (pos == s.size()) return t;
    if (s[pos] == 'Z' && pos + 1 == s.size()) return t;
    if ((s[pos] == '+' || s[pos] == '-') && (s.size() == pos + 6 || s.size() == pos + 5)) {
        const int oh = digits(s, pos + 1, 2);
        const std::size_t mpos = s[pos + 3] == ':' ? pos + 4 : pos + 3;
        const int om = digits(s, mpos, 2);
        const auto offset = hours{oh} + minutes{om};
        return s[pos] == '+' ? t - offset : t + offset;
    }
    throw Error("bad timezone in '" + std::string(s) + "'");
}

std::string format_iso8601(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::string format_date(std::chrono::sys_days day) {
    using namespace std::chrono;
    const year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::chrono::sys_days parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw Error("bad date '" + std::string(s) + "'");
    return make_day(s, digits(s, 0, 4), digits(s, 5, 2), digits(s, 8, 2));
}

}  // namespace papageno
