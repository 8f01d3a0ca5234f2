#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace meshflood {

using NodeId = std::uint32_t;

enum class Role { Source, Client };

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Error taxonomy. Each maps onto a distinct CLI exit code or test expectation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EmptyScenarioError : public Error { using Error::Error; };
class LookupError : public Error { using Error::Error; };
class SizeLimitError : public Error { using Error::Error; };
class StaleAssignmentError : public Error { using Error::Error; };
class ProtocolViolation : public Error { using Error::Error; };
class AccountingError : public Error { using Error::Error; };
class ComparisonError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };

/// Simulation time in integer microseconds.
class SimTime {
 public:
  constexpr SimTime() = default;
  static constexpr SimTime micros(std::int64_t us) { return SimTime(us); }
  static constexpr SimTime seconds(std::int64_t s) { return SimTime(s * 1'000'000); }
  /// Rounds to the nearest microsecond.
  static SimTime from_seconds(double s) {
    return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6)));
  }
  static constexpr SimTime max() { return SimTime(std::numeric_limits<std::int64_t>::max()); }

  constexpr std::int64_t count() const { return us_; }
  constexpr double to_seconds() const { return static_cast<double>(us_) / 1e6; }
  /// Index of the one-second bucket containing this instant.
  constexpr std::int64_t whole_seconds() const {
    return us_ >= 0 ? us_ / 1'000'000 : -((-us_ + 999'999) / 1'000'000);
  }

  constexpr SimTime operator+(SimTime o) const { return SimTime(us_ + o.us_); }
  constexpr SimTime operator-(SimTime o) const { return SimTime(us_ - o.us_); }
  constexpr SimTime operator*(std::int64_t k) const { return SimTime(us_ * k); }
  constexpr SimTime& operator+=(SimTime o) { us_ += o.us_; return *this; }
  constexpr auto operator<=>(const SimTime&) const = default;

 private:
  constexpr explicit SimTime(std::int64_t us) : us_(us) {}
  std::int64_t us_ = 0;
};

// Shortest round-trip text for a double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace meshflood
