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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bijmatch {

/// Root of every exception thrown by the library. `kind()` is the stable
/// token printed by the command line front end ("invalid-argument", ...).
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

/// Non-finite or otherwise unusable numeric input.
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error("invalid-input", what) {}
};

/// Malformed bytes in a serialized file; carries the offending byte offset.
class FormatError : public Error {
public:
    FormatError(std::uint64_t offset, const std::string& what)
        : Error("format", what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset), detail_(what) {}
    std::uint64_t offset() const noexcept { return offset_; }
    /// Message without the offset suffix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::uint64_t offset_;
    std::string detail_;
};

/// Well-formed input that violates a semantic contract. Holds every
/// violation found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error("validation", join(violations)), violations_(std::move(violations)) {}
    explicit ValidationError(const std::string& violation)
        : ValidationError(std::vector<std::string>{violation}) {}
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty())
                out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

class StateError : public Error {
public:
    explicit StateError(const std::string& what) : Error("state", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

} // namespace bijmatch
