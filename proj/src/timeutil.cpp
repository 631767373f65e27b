#include "timeutil.hpp"

#include <charconv>
#include <cstdio>

namespace fxp {

namespace {

// Civil-date conversions after Howard Hinnant's algorithms; valid over the
// whole int64 range we care about.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = yr + (m <= 2);
}

bool is_leap(std::int64_t y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(std::int64_t y, unsigned m) {
  static const unsigned len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return len[m - 1];
}

bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
  if (pos + len > s.size()) return false;
  unsigned v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::optional<Timestamp> parse_utc(std::string_view s) {
  // YYYY-MM-DD is mandatory.
  unsigned yr, mo, da, ho, mi, se = 0;
  if (!parse_fixed(s, 0, 4, yr)) return std::nullopt;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!parse_fixed(s, 5, 2, mo) || !parse_fixed(s, 8, 2, da)) return std::nullopt;
  if (s.size() < 16) return std::nullopt;
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  if (!parse_fixed(s, 11, 2, ho)) return std::nullopt;
  if (s[13] != ':' || !parse_fixed(s, 14, 2, mi)) return std::nullopt;
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    if (!parse_fixed(s, pos + 1, 2, se)) return std::nullopt;
    pos += 3;
  }
  if (pos < s.size()) {
    if (s[pos] != 'Z' || pos + 1 != s.size()) return std::nullopt;
  }
  if (mo < 1 || mo > 12) return std::nullopt;
  if (da < 1 || da > days_in_month(yr, mo)) return std::nullopt;
  if (ho > 23 || mi > 59 || se > 59) return std::nullopt;
  const std::int64_t days = days_from_civil(yr, mo, da);
  return days * 86400 + ho * 3600 + mi * 60 + se;
}

std::string format_utc(Timestamp t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d, static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60), static_cast<long long>(rem % 60));
  return buf;
}

std::int64_t utc_day(Timestamp t) {
  std::int64_t days = t / 86400;
  if (t % 86400 < 0) --days;
  return days;
}

}  // namespace fxp
