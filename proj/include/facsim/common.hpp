// Copyright 2026 The facsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace facsim {

/// Invalid parameters, world spec, or run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure left its domain of validity.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kNumAgeGroups = 3;

enum class AgeGroup : std::uint8_t { Under50 = 0, From50To64 = 1, Over65 = 2 };

inline constexpr std::array<AgeGroup, kNumAgeGroups> kAgeGroups{
    AgeGroup::Under50, AgeGroup::From50To64, AgeGroup::Over65};

inline constexpr std::size_t index_of(AgeGroup a) { return static_cast<std::size_t>(a); }

/// Calendar day. Thin wrapper over std::chrono::sys_days with ISO-8601 I/O.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days d) : days_(d) {}
  Date(int y, unsigned m, unsigned d)
      : days_(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}}) {}

  static Date parse(std::string_view s) {
    // YYYY-MM-DD
    auto fail = [&]() -> Date {
      throw ConfigError("invalid ISO date '" + std::string(s) + "'");
    };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return fail();
    int y = 0;
    unsigned m = 0, d = 0;
    auto ok = [](std::from_chars_result r, const char* end) {
      return r.ec == std::errc{} && r.ptr == end;
    };
    if (!ok(std::from_chars(s.data(), s.data() + 4, y), s.data() + 4) ||
        !ok(std::from_chars(s.data() + 5, s.data() + 7, m), s.data() + 7) ||
        !ok(std::from_chars(s.data() + 8, s.data() + 10, d), s.data() + 10)) {
      return fail();
    }
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) return fail();
    return Date(std::chrono::sys_days{ymd});
  }

  std::string iso() const {
    std::chrono::year_month_day ymd{days_};
    char buf[11];
    const int y = static_cast<int>(ymd.year());
    const unsigned m = static_cast<unsigned>(ymd.month());
    const unsigned d = static_cast<unsigned>(ymd.day());
    buf[0] = static_cast<char>('0' + (y / 1000) % 10);
    buf[1] = static_cast<char>('0' + (y / 100) % 10);
    buf[2] = static_cast<char>('0' + (y / 10) % 10);
    buf[3] = static_cast<char>('0' + y % 10);
    buf[4] = '-';
    buf[5] = static_cast<char>('0' + m / 10);
    buf[6] = static_cast<char>('0' + m % 10);
    buf[7] = '-';
    buf[8] = static_cast<char>('0' + d / 10);
    buf[9] = static_cast<char>('0' + d % 10);
    return std::string(buf, 10);
  }

  Date plus_days(std::int64_t n) const { return Date(days_ + std::chrono::days{n}); }
  std::int64_t days_since(Date other) const { return (days_ - other.days_).count(); }

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// Shortest round-trip decimal form of a double; locale independent.
inline std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace facsim
