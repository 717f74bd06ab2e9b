#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace qnet {

/// Simulation clock value in integer picoseconds.
///
/// All event ordering and reservation arithmetic happens on this type so
/// that repeated backoffs and attempt cadences never accumulate rounding
/// drift. Seconds are used only at API and file boundaries.
class SimTime {
public:
    static constexpr std::int64_t kPerSecond = 1'000'000'000'000;

    constexpr SimTime() = default;

    static constexpr SimTime from_ps(std::int64_t ps) { return SimTime{ps}; }
    static SimTime from_seconds(double s) { return SimTime{std::llround(s * static_cast<double>(kPerSecond))}; }

    constexpr std::int64_t ps() const { return ps_; }
    constexpr double seconds() const { return static_cast<double>(ps_) / static_cast<double>(kPerSecond); }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime& operator+=(SimTime o) { ps_ += o.ps_; return *this; }
    constexpr SimTime& operator-=(SimTime o) { ps_ -= o.ps_; return *this; }
    friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.ps_ + b.ps_}; }
    friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.ps_ - b.ps_}; }
    friend constexpr SimTime operator*(std::int64_t n, SimTime t) { return SimTime{n * t.ps_}; }

private:
    constexpr explicit SimTime(std::int64_t ps) : ps_(ps) {}
    std::int64_t ps_ = 0;
};

} // namespace qnet
