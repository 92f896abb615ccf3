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
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace colasim {

using json = nlohmann::json;

/// Input file problem; the message names the offending field path.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Strict reader over one JSON object: every access is type-checked and
/// errors carry the dotted field path. Unknown keys are rejected by
/// allow_only().
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path);

    const std::string& path() const { return path_; }
    bool has(std::string_view key) const;

    void allow_only(std::initializer_list<std::string_view> keys) const;

    double number(std::string_view key) const;
    std::optional<double> opt_number(std::string_view key) const;
    std::int64_t integer(std::string_view key) const;
    std::optional<std::int64_t> opt_integer(std::string_view key) const;
    std::string string(std::string_view key) const;
    std::optional<std::string> opt_string(std::string_view key) const;
    bool boolean(std::string_view key) const;
    std::optional<bool> opt_boolean(std::string_view key) const;
    const json& array(std::string_view key) const;
    const json& object(std::string_view key) const;
    const json& value(std::string_view key) const;

    std::string child(std::string_view key) const;
    std::string element(std::string_view key, std::size_t index) const;

    [[noreturn]] void fail(std::string_view key, const std::string& msg) const;

private:
    const json& j_;
    std::string path_;
};

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace colasim
