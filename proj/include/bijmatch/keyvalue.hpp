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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bijmatch {

/// The structured-text dialect shared by manifests, scene configs and
/// reports: one `key = value` per line, `#` starts a comment, blank lines
/// ignored. Keys are unique; insertion order is preserved on output.
class KeyValueDoc {
public:
    /// Throws ConfigError naming the line on malformed input.
    static KeyValueDoc parse(std::string_view text);
    static KeyValueDoc load(const std::filesystem::path& path);

    void set(const std::string& key, std::string value);
    template <typename T>
    void set(const std::string& key, const T& value) {
        set(key, std::to_string(value));
    }

    bool has(std::string_view key) const noexcept;
    std::optional<std::string> get(std::string_view key) const;
    const std::string& require(std::string_view key) const;
    int require_int(std::string_view key) const;
    double require_double(std::string_view key) const;
    int get_int(std::string_view key, int fallback) const;
    double get_double(std::string_view key, double fallback) const;
    /// Whitespace-separated integers.
    std::vector<int> get_ints(std::string_view key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
    std::string to_string() const;
    void save(const std::filesystem::path& path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Whitespace split.
std::vector<std::string> split_words(std::string_view s);
int parse_int(std::string_view s, std::string_view what);
double parse_double(std::string_view s, std::string_view what);

} // namespace bijmatch
