// Copyright 2026 The cola-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace colasim {

/// Raised when SimTime arithmetic would overflow or produce a negative instant.
class TimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Simulated time in integer microseconds since the start of a run.
///
/// Also used for durations. Values are never negative and arithmetic is
/// checked: overflow or underflow throws TimeError instead of wrapping.
class SimTime {
public:
    constexpr SimTime() = default;

    static SimTime from_us(std::int64_t us);
    static SimTime from_ms(std::int64_t ms);
    static SimTime from_seconds(double seconds);  // rounds to nearest µs

    static constexpr SimTime zero() { return SimTime{}; }
    static constexpr SimTime max() { return SimTime(INT64_MAX, Raw{}); }

    constexpr std::int64_t us() const { return us_; }
    constexpr double ms() const { return static_cast<double>(us_) / 1e3; }
    constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

    SimTime operator+(SimTime other) const;
    SimTime operator-(SimTime other) const;
    SimTime operator*(std::int64_t factor) const;
    SimTime& operator+=(SimTime other) { return *this = *this + other; }
    SimTime& operator-=(SimTime other) { return *this = *this - other; }

    /// Signed difference a - b in microseconds; may be negative.
    static std::int64_t signed_diff(SimTime a, SimTime b);

    constexpr auto operator<=>(const SimTime&) const = default;

    std::string str() const;

private:
    struct Raw {};
    constexpr SimTime(std::int64_t us, Raw) : us_(us) {}

    std::int64_t us_ = 0;
};

namespace literals {
inline SimTime operator""_us(unsigned long long v) { return SimTime::from_us(static_cast<std::int64_t>(v)); }
inline SimTime operator""_ms(unsigned long long v) { return SimTime::from_ms(static_cast<std::int64_t>(v)); }
}  // namespace literals

}  // namespace colasim
