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
#include <map>
#include <string>
#include <vector>

namespace colasim {

/// Track confirmation rule: publish after `a` detections within the last
/// `n` frames.
struct FusionSpec {
    int a = 3;
    int n = 5;

    bool operator==(const FusionSpec&) const = default;
};

std::vector<std::string> validate_fusion(const FusionSpec& f, const std::string& where);

/// Detection bits of one object, newest frame in bit 0.
struct DetectionWindow {
    std::uint64_t bits = 0;
    int hits() const;
};

using TrackHistory = std::map<std::string, DetectionWindow>;

struct FusionUpdate {
    std::vector<std::string> published;  // sorted ids
    TrackHistory history;
};

FusionUpdate fusion_update(const FusionSpec& f, const TrackHistory& history, const std::vector<std::string>& detections);

}  // namespace colasim
