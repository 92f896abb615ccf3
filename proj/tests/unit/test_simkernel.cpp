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

#include <doctest.h>

#include <string>
#include <vector>

#include "colasim/kernel.hpp"
#include "colasim/random.hpp"
#include "colasim/sim_time.hpp"

using namespace colasim;
using namespace colasim::literals;

TEST_SUITE("simkernel") {

TEST_CASE("SimTime arithmetic is checked") {
    CHECK((10_ms + 5_ms).us() == 15'000);
    CHECK((10_ms - 5_ms) == 5_ms);
    CHECK((3_ms * 4) == 12_ms);
    CHECK_THROWS_AS(5_ms - 10_ms, TimeError);
    CHECK_THROWS_AS(SimTime::max() + 1_us, TimeError);
    CHECK_THROWS_AS(SimTime::from_us(-1), TimeError);
    CHECK_THROWS_AS(SimTime::max() * 2, TimeError);
    CHECK(SimTime::signed_diff(5_ms, 10_ms) == -5'000);
    CHECK(SimTime::from_seconds(1.0000004) == SimTime::from_us(1'000'000));
    CHECK(1_ms < 2_ms);
}

TEST_CASE("same-instant events fire in scheduling order") {
    Kernel k;
    std::vector<int> log;
    k.schedule(100_us, [&] { log.push_back(1); });
    k.schedule(100_us, [&] { log.push_back(2); });
    k.run_all();
    CHECK(log == std::vector<int>{1, 2});
}

TEST_CASE("scheduling into the past throws") {
    Kernel k;
    k.schedule(60_us, [] {});
    k.run_all();
    REQUIRE(k.now() == 60_us);
    CHECK_THROWS_AS(k.schedule(50_us, [] {}), SchedulingError);
}

TEST_CASE("event at t=0 fires with clock 0") {
    Kernel k;
    SimTime seen = 1_ms;
    k.schedule(0_us, [&] { seen = k.now(); });
    k.run_until(10_us);
    CHECK(seen == 0_us);
}

TEST_CASE("run_until orders events and advances to the horizon") {
    Kernel k;
    std::vector<std::int64_t> log;
    for (auto t : {30, 10, 20}) k.schedule(SimTime::from_us(t), [&, t] { log.push_back(t); });
    CHECK(k.run_until(1000_us) == 1000_us);
    CHECK(log == std::vector<std::int64_t>{10, 20, 30});

    Kernel empty;
    CHECK(empty.run_until(1000_us) == 1000_us);
    CHECK(empty.executed() == 0);
}

TEST_CASE("cascading events inside the horizon fire") {
    Kernel k;
    std::vector<std::int64_t> log;
    k.schedule(10_us, [&] {
        log.push_back(k.now().us());
        k.schedule(15_us, [&] { log.push_back(k.now().us()); });
    });
    k.run_until(20_us);
    CHECK(log == std::vector<std::int64_t>{10, 15});
}

TEST_CASE("events past the horizon stay queued") {
    Kernel k;
    bool fired = false;
    k.schedule(50_us, [&] { fired = true; });
    k.run_until(20_us);
    CHECK_FALSE(fired);
    CHECK(k.pending() == 1);
    k.run_until(50_us);
    CHECK(fired);
}

TEST_CASE("cancel") {
    Kernel k;
    bool fired = false;
    auto h = k.schedule(10_us, [&] { fired = true; });
    CHECK(k.cancel(h));
    CHECK_FALSE(k.cancel(h));
    k.run_all();
    CHECK_FALSE(fired);

    auto h2 = k.schedule(20_us, [] {});
    k.run_all();
    CHECK_FALSE(k.cancel(h2));
}

TEST_CASE("cancelled event leaves the same log as never scheduling it") {
    auto program = [](bool with_cancelled) {
        Kernel k;
        std::vector<std::int64_t> log;
        k.schedule(5_us, [&] { log.push_back(5); });
        if (with_cancelled) {
            auto h = k.schedule(7_us, [&] { log.push_back(7); });
            k.cancel(h);
        }
        k.schedule(9_us, [&] { log.push_back(9); });
        k.run_all();
        return log;
    };
    CHECK(program(true) == program(false));
}

TEST_CASE("clock is monotone") {
    Kernel k;
    SimTime last;
    bool monotone = true;
    RandomStream rng(9, "kernel");
    for (int i = 0; i < 200; ++i) {
        k.schedule(SimTime::from_us(static_cast<std::int64_t>(rng.next_u64() % 1000)), [&] {
            monotone = monotone && k.now() >= last;
            last = k.now();
        });
    }
    k.run_all();
    CHECK(monotone);
}

TEST_CASE("random streams are independent of interleaving") {
    RandomStream a1(42, "latency:perception");
    std::vector<std::uint64_t> alone;
    for (int i = 0; i < 8; ++i) alone.push_back(a1.next_u64());

    RandomStream a2(42, "latency:perception");
    RandomStream other(42, "latency:planning");
    std::vector<std::uint64_t> mixed;
    for (int i = 0; i < 8; ++i) {
        other.next_u64();
        mixed.push_back(a2.next_u64());
    }
    CHECK(alone == mixed);

    RandomStream b(42, "latency:planning");
    RandomStream c(43, "latency:perception");
    CHECK(b.next_u64() != alone.front());
    CHECK(c.next_u64() != alone.front());
}

TEST_CASE("random helpers stay in range") {
    RandomStream r(1, "range");
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform01();
        CHECK((u >= 0.0 && u < 1.0));
        const double v = r.uniform(-2.0, 3.0);
        CHECK((v >= -2.0 && v < 3.0));
    }
    double sum = 0;
    for (int i = 0; i < 20000; ++i) sum += static_cast<double>(r.poisson(4.0));
    CHECK(sum / 20000.0 == doctest::Approx(4.0).epsilon(0.03));
}

}  // TEST_SUITE
