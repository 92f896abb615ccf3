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

#include "colasim/kernel.hpp"

namespace colasim {

EventHandle Kernel::schedule(SimTime fire_at, Action action) {
    if (fire_at < now_) {
        throw SchedulingError("cannot schedule at " + fire_at.str() + ": clock is already at " + now_.str());
    }
    const std::uint64_t seq = next_seq_++;
    events_.emplace(Key{fire_at.us(), seq}, std::move(action));
    return EventHandle{seq, fire_at};
}

bool Kernel::cancel(const EventHandle& handle) {
    return events_.erase(Key{handle.fire_at.us(), handle.seq}) > 0;
}

bool Kernel::step(SimTime horizon) {
    if (events_.empty()) return false;
    auto it = events_.begin();
    if (it->first.first > horizon.us()) return false;
    now_ = SimTime::from_us(it->first.first);
    Action action = std::move(it->second);
    events_.erase(it);
    ++executed_;
    try {
        action();
    } catch (const SchedulingError& e) {
        throw SchedulingError(std::string("event at ") + now_.str() + " failed: " + e.what());
    }
    return true;
}

SimTime Kernel::run_until(SimTime horizon) {
    while (step(horizon)) {
    }
    if (now_ < horizon) now_ = horizon;
    return now_;
}

SimTime Kernel::run_all() {
    while (step(SimTime::max())) {
    }
    return now_;
}

}  // namespace colasim
