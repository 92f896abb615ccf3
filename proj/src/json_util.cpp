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

#include "colasim/json_util.hpp"

#include <fstream>
#include <sstream>

namespace colasim {

ObjectReader::ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(path_ + ": expected an object");
}

bool ObjectReader::has(std::string_view key) const { return j_.contains(std::string(key)); }

void ObjectReader::allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, _] : j_.items()) {
        bool known = false;
        for (auto allowed : keys) {
            if (k == allowed) {
                known = true;
                break;
            }
        }
        if (!known) throw ParseError(child(k) + ": unknown field");
    }
}

std::string ObjectReader::child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

std::string ObjectReader::element(std::string_view key, std::size_t index) const {
    return child(key) + "[" + std::to_string(index) + "]";
}

void ObjectReader::fail(std::string_view key, const std::string& msg) const {
    throw ParseError(child(key) + ": " + msg);
}

const json& ObjectReader::value(std::string_view key) const {
    auto it = j_.find(std::string(key));
    if (it == j_.end()) fail(key, "missing required field");
    return *it;
}

double ObjectReader::number(std::string_view key) const {
    const json& v = value(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
}

std::optional<double> ObjectReader::opt_number(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
}

std::int64_t ObjectReader::integer(std::string_view key) const {
    const json& v = value(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<std::int64_t>();
}

std::optional<std::int64_t> ObjectReader::opt_integer(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return integer(key);
}

std::string ObjectReader::string(std::string_view key) const {
    const json& v = value(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

std::optional<std::string> ObjectReader::opt_string(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return string(key);
}

bool ObjectReader::boolean(std::string_view key) const {
    const json& v = value(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
}

std::optional<bool> ObjectReader::opt_boolean(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return boolean(key);
}

const json& ObjectReader::array(std::string_view key) const {
    const json& v = value(key);
    if (!v.is_array()) fail(key, "expected an array");
    return v;
}

const json& ObjectReader::object(std::string_view key) const {
    const json& v = value(key);
    if (!v.is_object()) fail(key, "expected an object");
    return v;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": malformed JSON: " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace colasim
