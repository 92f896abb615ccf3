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

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

#include "colasim/sim_time.hpp"

namespace colasim {

class SchedulingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Identifies one scheduled event; used for cancellation.
struct EventHandle {
    std::uint64_t seq = 0;
    SimTime fire_at;
};

/// Discrete-event kernel: a virtual clock plus an event queue ordered by
/// (fire_at, seq). Events scheduled for the same instant fire in the order
/// they were scheduled. Single-threaded; one kernel per run.
class Kernel {
public:
    using Action = std::function<void()>;

    SimTime now() const { return now_; }

    /// Throws SchedulingError if fire_at is earlier than now().
    EventHandle schedule(SimTime fire_at, Action action);
    EventHandle schedule_after(SimTime delay, Action action) { return schedule(now_ + delay, std::move(action)); }

    /// True if the event was still pending and has been removed.
    bool cancel(const EventHandle& handle);

    /// Executes every event with fire_at <= horizon, then advances the clock
    /// to horizon. Returns the clock.
    SimTime run_until(SimTime horizon);

    /// Runs until the queue is empty; the clock stays at the last event.
    SimTime run_all();

    std::size_t pending() const { return events_.size(); }
    std::uint64_t executed() const { return executed_; }

private:
    using Key = std::pair<std::int64_t, std::uint64_t>;

    bool step(SimTime horizon);

    std::map<Key, Action> events_;
    SimTime now_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t executed_ = 0;
};

}  // namespace colasim
