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


#include "bijmatch/error.hpp"
#include "bijmatch/keyvalue.hpp"

#include <doctest.h>

using namespace bijmatch;

TEST_CASE("key=value parsing") {
    const KeyValueDoc d = KeyValueDoc::parse("# comment\n\nframes = 10\nname=a b  c \n  ratio = 0.25 # trailing\n");
    CHECK(d.require_int("frames") == 10);
    CHECK(d.require("name") == "a b  c");
    CHECK(d.require_double("ratio") == 0.25);
    CHECK(d.get_int("missing", 7) == 7);
    CHECK_FALSE(d.get("missing").has_value());
    CHECK_THROWS_AS(d.require("missing"), ConfigError);
    CHECK_THROWS_AS(d.require_int("name"), ConfigError);
}

TEST_CASE("key=value errors") {
    CHECK_THROWS_AS(KeyValueDoc::parse("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueDoc::parse("= value\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueDoc::parse("a = 1\na = 2\n"), ConfigError);
}

TEST_CASE("key=value round trip keeps order") {
    KeyValueDoc d;
    d.set("zeta", 1);
    d.set("alpha", std::string("x y"));
    d.set("mid", 2.5);
    const KeyValueDoc back = KeyValueDoc::parse(d.to_string());
    REQUIRE(back.entries().size() == 3);
    CHECK(back.entries()[0].first == "zeta");
    CHECK(back.entries()[1].second == "x y");
    CHECK(back.get_ints("zeta") == std::vector<int>{1});
    d.set("zeta", 5);
    CHECK(d.require_int("zeta") == 5);
    CHECK(d.entries().size() == 3);
}

TEST_CASE("helpers") {
    CHECK(split_words("  a\tb  c\n") == std::vector<std::string>{"a", "b", "c"});
    CHECK(parse_int("-12", "n") == -12);
    CHECK_THROWS_AS(parse_int("12a", "n"), ConfigError);
    CHECK(parse_double("1e-3", "x") == 1e-3);
    CHECK_THROWS_AS(parse_double("abc", "x"), ConfigError);
}
