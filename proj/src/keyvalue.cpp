// Copyright 2026 The bijmatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bijmatch/keyvalue.hpp"

#include "bijmatch/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace bijmatch {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string w;
    while (in >> w)
        out.push_back(w);
    return out;
}

int parse_int(std::string_view s, std::string_view what) {
    s = trim(s);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(std::string(what) + ": expected an integer, got '" + std::string(s) + "'");
    return v;
}

double parse_double(std::string_view s, std::string_view what) {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(std::string(what) + ": expected a number, got '" + std::string(s) + "'");
    return v;
}

KeyValueDoc KeyValueDoc::parse(std::string_view text) {
    KeyValueDoc doc;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (doc.has(key))
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        doc.entries_.emplace_back(key, std::string(trim(line.substr(eq + 1))));
    }
    return doc;
}

KeyValueDoc KeyValueDoc::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void KeyValueDoc::set(const std::string& key, std::string value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(key, std::move(value));
}

bool KeyValueDoc::has(std::string_view key) const noexcept {
    return std::any_of(entries_.begin(), entries_.end(), [key](const auto& e) { return e.first == key; });
}

std::optional<std::string> KeyValueDoc::get(std::string_view key) const {
    for (const auto& [k, v] : entries_)
        if (k == key)
            return v;
    return std::nullopt;
}

const std::string& KeyValueDoc::require(std::string_view key) const {
    for (const auto& [k, v] : entries_)
        if (k == key)
            return v;
    throw ConfigError("missing key '" + std::string(key) + "'");
}

int KeyValueDoc::require_int(std::string_view key) const {
    return parse_int(require(key), key);
}

double KeyValueDoc::require_double(std::string_view key) const {
    return parse_double(require(key), key);
}

int KeyValueDoc::get_int(std::string_view key, int fallback) const {
    const auto v = get(key);
    return v ? parse_int(*v, key) : fallback;
}

double KeyValueDoc::get_double(std::string_view key, double fallback) const {
    const auto v = get(key);
    return v ? parse_double(*v, key) : fallback;
}

std::vector<int> KeyValueDoc::get_ints(std::string_view key) const {
    std::vector<int> out;
    for (const auto& w : split_words(require(key)))
        out.push_back(parse_int(w, key));
    return out;
}

std::string KeyValueDoc::to_string() const {
    std::string out;
    for (const auto& [k, v] : entries_)
        out += k + " = " + v + "\n";
    return out;
}

void KeyValueDoc::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << to_string();
    if (!out)
        throw IoError("write failed: " + path.string());
}

} // namespace bijmatch
