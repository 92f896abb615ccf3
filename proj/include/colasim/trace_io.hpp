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

#include <string>

#include "colasim/engine.hpp"

namespace colasim {

inline constexpr int kTraceFormat = 1;

/// Newline-delimited JSON, one record per line, in this order:
///   header                           scenario, hash, pipeline, seed, duration_us, config
///   span*                            completion order
///   frame*                           completion order
///   reaction*                        scenario hazard order
///   safety*                          tick order
///   decision*, budget_miss*, proactive*
///   summary                          counters, worker busy time, ego trajectory
/// Every record has a "type" field naming its kind. Times are integer
/// microseconds in *_us fields.
std::string trace_to_ndjson(const RunTrace& trace);
RunTrace trace_from_ndjson(const std::string& text);

void write_trace(const RunTrace& trace, const std::string& path);
RunTrace load_trace(const std::string& path);

}  // namespace colasim
