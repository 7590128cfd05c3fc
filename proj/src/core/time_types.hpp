#pragma once

#include <compare>

namespace relsim {

inline constexpr double kSecondsPerMinute = 60.0;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr int kDefaultGpusPerNode = 8;

// Duration in seconds. Negative values are rejected at validation sites,
// not in the arithmetic itself.
struct TimeSpan {
  double s{0.0};

  static constexpr TimeSpan seconds(double v) { return {v}; }
  static constexpr TimeSpan minutes(double v) { return {v * kSecondsPerMinute}; }
  static constexpr TimeSpan hours(double v) { return {v * kSecondsPerHour}; }
  static constexpr TimeSpan days(double v) { return {v * kSecondsPerDay}; }

  constexpr double to_minutes() const { return s / kSecondsPerMinute; }
  constexpr double to_hours() const { return s / kSecondsPerHour; }
  constexpr double to_days() const { return s / kSecondsPerDay; }

  auto operator<=>(const TimeSpan&) const = default;
};

// Seconds since the simulation epoch (t = 0).
struct TimePoint {
  double s{0.0};
  auto operator<=>(const TimePoint&) const = default;
};

constexpr TimeSpan operator+(TimeSpan a, TimeSpan b) { return {a.s + b.s}; }
constexpr TimeSpan operator-(TimeSpan a, TimeSpan b) { return {a.s - b.s}; }
constexpr TimeSpan operator*(TimeSpan a, double k) { return {a.s * k}; }
constexpr TimeSpan operator*(double k, TimeSpan a) { return {a.s * k}; }
constexpr TimeSpan operator/(TimeSpan a, double k) { return {a.s / k}; }
constexpr TimePoint operator+(TimePoint t, TimeSpan d) { return {t.s + d.s}; }
constexpr TimePoint operator-(TimePoint t, TimeSpan d) { return {t.s - d.s}; }
constexpr TimeSpan operator-(TimePoint a, TimePoint b) { return {a.s - b.s}; }

// Failures per node-day. The only place the per-day/per-second conversion
// happens is per_second().
struct FailureRate {
  double per_node_day{0.0};
  constexpr double per_second() const { return per_node_day / kSecondsPerDay; }
  static constexpr FailureRate per_1000_node_days(double v) { return {v / 1000.0}; }
  auto operator<=>(const FailureRate&) const = default;
};

}  // namespace relsim
