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

#include "colasim/fusion.hpp"

#include <algorithm>
#include <bit>

namespace colasim {

std::vector<std::string> validate_fusion(const FusionSpec& f, const std::string& where) {
    std::vector<std::string> out;
    if (f.n < 1 || f.n > 64) out.push_back(where + ".n: must be in [1, 64]");
    if (f.a < 1 || f.a > f.n) out.push_back(where + ".a: must be in [1, n]");
    return out;
}

int DetectionWindow::hits() const { return std::popcount(bits); }

FusionUpdate fusion_update(const FusionSpec& f, const TrackHistory& history, const std::vector<std::string>& detections) {
    const std::uint64_t mask = f.n >= 64 ? ~0ULL : ((1ULL << f.n) - 1);
    FusionUpdate out;
    for (const auto& [id, w] : history) {
        const std::uint64_t shifted = (w.bits << 1) & mask;
        if (shifted != 0) out.history[id].bits = shifted;
    }
    for (const auto& id : detections) out.history[id].bits |= 1ULL;
    for (const auto& [id, w] : out.history) {
        if (w.hits() >= f.a) out.published.push_back(id);
    }
    return out;
}

}  // namespace colasim
