// Time axis tokens. Files may index steps either as calendar months
// ("YYYY-MM") or as plain integers; both orderings are chronological.
#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace dccm {

struct TimeKey {
  long long ordinal = 0;  // months since year 0, or the raw integer
  bool is_month = false;

  friend auto operator<=>(const TimeKey&, const TimeKey&) = default;

  TimeKey next() const { return {ordinal + 1, is_month}; }

  std::string str() const {
    if (!is_month) return std::to_string(ordinal);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02lld", ordinal / 12, ordinal % 12 + 1);
    return buf;
  }

  static TimeKey parse(const std::string& s) {
    if (s.size() == 7 && s[4] == '-') {
      int y = 0, m = 0;
      auto [py, ey] = std::from_chars(s.data(), s.data() + 4, y);
      auto [pm, em] = std::from_chars(s.data() + 5, s.data() + 7, m);
      if (ey == std::errc{} && em == std::errc{} && py == s.data() + 4 &&
          pm == s.data() + 7 && m >= 1 && m <= 12)
        return {static_cast<long long>(y) * 12 + (m - 1), true};
      throw std::invalid_argument("bad month token: " + s);
    }
    long long v = 0;
    auto [p, e] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (e != std::errc{} || p != s.data() + s.size())
      throw std::invalid_argument("bad time token: " + s);
    return {v, false};
  }
};

}  // namespace dccm
