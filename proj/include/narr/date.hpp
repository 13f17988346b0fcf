#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace narr {

// Calendar day (UTC) and second-resolution instant.
using Day = std::chrono::sys_days;
using Instant = std::chrono::sys_seconds;

namespace detail {

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Reads exactly `width` digits at `pos`, advancing it.
inline std::optional<int> read_fixed(std::string_view s, std::size_t& pos, std::size_t width) {
  if (pos + width > s.size()) return std::nullopt;
  int v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    char c = s[pos + i];
    if (!is_digit(c)) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  pos += width;
  return v;
}

inline std::optional<Day> read_date(std::string_view s, std::size_t& pos) {
  auto y = read_fixed(s, pos, 4);
  if (!y || pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  auto m = read_fixed(s, pos, 2);
  if (!m || pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  auto d = read_fixed(s, pos, 2);
  if (!d) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return Day{ymd};
}

}  // namespace detail

// Strict YYYY-MM-DD.
inline std::optional<Day> parse_date(std::string_view s) {
  std::size_t pos = 0;
  auto d = detail::read_date(s, pos);
  if (!d || pos != s.size()) return std::nullopt;
  return d;
}

// ISO-8601 subset: a date, optionally followed by 'T' or ' ' and hh:mm[:ss[.frac]],
// optionally followed by 'Z' or a numeric offset (+hh, +hhmm, +hh:mm). Missing
// offset means UTC. Fractional seconds are truncated.
inline std::optional<Instant> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  std::size_t pos = 0;
  auto day = detail::read_date(s, pos);
  if (!day) return std::nullopt;
  Instant t{*day};
  if (pos == s.size()) return t;
  if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
  ++pos;

  auto hh = detail::read_fixed(s, pos, 2);
  if (!hh || pos >= s.size() || s[pos] != ':') return std::nullopt;
  ++pos;
  auto mm = detail::read_fixed(s, pos, 2);
  if (!mm) return std::nullopt;
  int ss = 0;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    auto sec = detail::read_fixed(s, pos, 2);
    if (!sec) return std::nullopt;
    ss = *sec;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      ++pos;
      std::size_t start = pos;
      while (pos < s.size() && detail::is_digit(s[pos])) ++pos;
      if (pos == start) return std::nullopt;
    }
  }
  // 24:00:00 is not accepted; leap second 60 is folded into the next minute.
  if (*hh > 23 || *mm > 59 || ss > 60) return std::nullopt;
  t += hours{*hh} + minutes{*mm} + seconds{ss};

  if (pos == s.size()) return t;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    int sign = s[pos] == '+' ? 1 : -1;
    ++pos;
    auto oh = detail::read_fixed(s, pos, 2);
    if (!oh) return std::nullopt;
    int om = 0;
    if (pos < s.size()) {
      if (s[pos] == ':') ++pos;
      auto m = detail::read_fixed(s, pos, 2);
      if (!m) return std::nullopt;
      om = *m;
    }
    if (*oh > 23 || om > 59) return std::nullopt;
    t -= sign * (hours{*oh} + minutes{om});
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  return t;
}

inline Day day_of(Instant t) { return std::chrono::floor<std::chrono::days>(t); }

inline std::string format_date(Day d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_timestamp(Instant t) {
  auto d = day_of(t);
  auto secs = (t - Instant{d}).count();
  char buf[48];
  std::snprintf(buf, sizeof buf, "T%02lld:%02lld:%02lldZ", static_cast<long long>(secs / 3600),
                static_cast<long long>(secs / 60 % 60), static_cast<long long>(secs % 60));
  return format_date(d) + buf;
}

}  // namespace narr
