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
#include <random>
#include <string>
#include <string_view>

namespace colasim {

/// 64-bit FNV-1a; used for stream labels and content hashes.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// One seeded random source per stochastic component. The sequence depends
/// only on (seed, stream_id), so draws from one stream never perturb another.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::string stream_id);

    std::uint64_t seed() const { return seed_; }
    const std::string& stream_id() const { return stream_id_; }
    std::uint64_t draws() const { return draws_; }

    std::uint64_t next_u64();
    double uniform01();                    // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double normal();                       // standard normal
    std::uint64_t poisson(double mean);

private:
    std::uint64_t seed_;
    std::string stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uint64_t draws_ = 0;
};

}  // namespace colasim
