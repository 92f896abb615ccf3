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

#include "colasim/sim_time.hpp"

#include <cmath>
#include <limits>

namespace colasim {

SimTime SimTime::from_us(std::int64_t us) {
    if (us < 0) throw TimeError("negative time: " + std::to_string(us) + "us");
    return SimTime(us, Raw{});
}

SimTime SimTime::from_ms(std::int64_t ms) {
    std::int64_t us = 0;
    if (__builtin_mul_overflow(ms, std::int64_t{1000}, &us)) throw TimeError("time overflow");
    return from_us(us);
}

SimTime SimTime::from_seconds(double seconds) {
    const double us = std::round(seconds * 1e6);
    if (!std::isfinite(us) || us >= 9.2e18) throw TimeError("time overflow");
    return from_us(static_cast<std::int64_t>(us));
}

SimTime SimTime::operator+(SimTime other) const {
    std::int64_t r = 0;
    if (__builtin_add_overflow(us_, other.us_, &r)) throw TimeError("time overflow");
    return SimTime(r, Raw{});
}

SimTime SimTime::operator-(SimTime other) const {
    if (other.us_ > us_) {
        throw TimeError("negative time: " + str() + " - " + other.str());
    }
    return SimTime(us_ - other.us_, Raw{});
}

SimTime SimTime::operator*(std::int64_t factor) const {
    std::int64_t r = 0;
    if (factor < 0) throw TimeError("negative time factor");
    if (__builtin_mul_overflow(us_, factor, &r)) throw TimeError("time overflow");
    return SimTime(r, Raw{});
}

std::int64_t SimTime::signed_diff(SimTime a, SimTime b) {
    std::int64_t r = 0;
    if (__builtin_sub_overflow(a.us_, b.us_, &r)) throw TimeError("time overflow");
    return r;
}

std::string SimTime::str() const { return std::to_string(us_) + "us"; }

}  // namespace colasim
