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


#include "bijmatch/cli.hpp"
#include "bijmatch/interchange.hpp"
#include "bijmatch/keyvalue.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bijmatch;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "bijmatch_unit" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool same_tree(const fs::path& a, const fs::path& b) {
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file())
            continue;
        const fs::path rel = fs::relative(entry.path(), a);
        if (!fs::exists(b / rel) || read_text(entry.path()) != read_text(b / rel))
            return false;
    }
    return true;
}

const char* kSceneConfig = R"(# small moving square
frames = 4
height = 8
width = 8
channels = 12
objects = 1
object1.size = 3 3
object1.position = 1 1
object1.velocity = 1 1
)";

} // namespace

TEST_CASE("synth, run and eval end to end") {
    const fs::path dir = fresh_dir("cli_e2e");
    std::ofstream(dir / "scene.txt") << kSceneConfig;
    const std::string bundle = (dir / "bundle").string();
    REQUIRE(cli({"synth", "--config", (dir / "scene.txt").string(), "--out", bundle, "--seed", "5"}).code == 0);
    CHECK(validate_bundle(bundle).ok());

    const Result run = cli({"run", "--bundle", bundle, "--out", (dir / "pred").string(), "--dump-scores"});
    REQUIRE(run.code == 0);
    CHECK(fs::exists(dir / "pred" / "masks" / "0003_obj1.png"));
    CHECK(fs::exists(dir / "pred" / "scores" / "0001_obj1_local.bmt"));
    CHECK(fs::exists(dir / "pred" / "scores" / "0001_obj1_global_fg.png"));

    const Result eval = cli({"eval", "--pred", (dir / "pred").string(), "--gt", bundle, "--report",
                             (dir / "report.txt").string()});
    REQUIRE(eval.code == 0);
    const KeyValueDoc report = KeyValueDoc::load(dir / "report.txt");
    CHECK(report.require_int("frames") == 4);
    CHECK(report.has("object1.frame.3"));

    SUBCASE("identical invocations give identical files") {
        REQUIRE(cli({"run", "--bundle", bundle, "--out", (dir / "pred2").string(), "--dump-scores"}).code == 0);
        CHECK(same_tree(dir / "pred", dir / "pred2"));
    }
    SUBCASE("huge local K matches unfiltered local matching") {
        REQUIRE(cli({"run", "--bundle", bundle, "--out", (dir / "big").string(), "--k-local", "1000000"}).code == 0);
        REQUIRE(cli({"run", "--bundle", bundle, "--out", (dir / "inf").string(), "--k-local", "inf"}).code == 0);
        CHECK(same_tree(dir / "big" / "masks", dir / "inf" / "masks"));
    }
    SUBCASE("weights file instead of a seed") {
        REQUIRE(cli({"run", "--bundle", bundle, "--out", (dir / "w").string(), "--seed", "3", "--weights", "x"}).code ==
                2);
    }
    SUBCASE("mismatched frame counts") {
        fs::remove(dir / "pred" / "masks" / "0003_obj1.png");
        const Result r = cli({"eval", "--pred", (dir / "pred").string(), "--gt", bundle, "--report",
                              (dir / "r2.txt").string()});
        CHECK(r.code == 1);
        CHECK(r.err.rfind("bijmatch: error: validation: ", 0) == 0);
        CHECK(r.err.find("frame count") != std::string::npos);
    }
}

TEST_CASE("usage errors exit with 2 and name the flag") {
    const Result r = cli({"run", "--bundle", "b", "--out", "o", "--k-local", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--k-local") != std::string::npos);
    CHECK(r.err.rfind("bijmatch: error: usage: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

    CHECK(cli({"run", "--bundle", "b", "--out", "o", "--k-global", "many"}).code == 2);
    CHECK(cli({"run", "--bundle", "b", "--out", "o", "--history", "0"}).code == 2);
    CHECK(cli({"run", "--bundle", "b", "--out", "o", "--frobnicate"}).code == 2);
    CHECK(cli({"run", "--bundle", "b"}).code == 2);
    CHECK(cli({"teleport"}).code == 2);
    CHECK(cli({}).code == 2);
}

TEST_CASE("validation and format failures exit with 1") {
    const fs::path dir = fresh_dir("cli_fail");
    const Result missing = cli({"run", "--bundle", (dir / "nope").string(), "--out", (dir / "o").string()});
    CHECK(missing.code == 1);
    CHECK(missing.err.rfind("bijmatch: error: validation: ", 0) == 0);

    std::ofstream(dir / "junk.bmt") << "XXXXjunk";
    const Result bad = cli({"viz-scores", "--in", (dir / "junk.bmt").string(), "--out", (dir / "x.png").string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.rfind("bijmatch: error: format: ", 0) == 0);
}

TEST_CASE("match and viz-scores") {
    const fs::path dir = fresh_dir("cli_match");
    FeatureMap ref(2, {2, 2}, {1, 0, 1, 0, 0, 1, 0, 1});
    write_tensor(to_tensor(ref), dir / "ref.bmt");
    BinaryMask m({32, 32});
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 32; ++x)
            m.set(y, x, true);
    write_mask_png(m, dir / "mask.png");
    const Result r = cli({"match", "--ref", (dir / "ref.bmt").string(), "--query", (dir / "ref.bmt").string(), "--mask",
                          (dir / "mask.png").string(), "--out", (dir / "scores").string(), "--k", "1"});
    REQUIRE(r.code == 0);
    const Tensor fg = read_tensor(dir / "scores" / "fg.bmt");
    CHECK(fg.dims == std::vector<std::uint32_t>{2, 2});
    CHECK(fg.f32[0] == 1.0f);
    CHECK(fg.f32[1] == 1.0f);

    REQUIRE(cli({"viz-scores", "--in", (dir / "scores" / "fg.bmt").string(), "--out", (dir / "fg.png").string()}).code ==
            0);
    CHECK(read_gray_png(dir / "fg.png").extent == Extent{32, 32});
}

TEST_CASE("version and help") {
    const Result v = cli({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("BMT1") != std::string::npos);
    const Result h = cli({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("viz-scores") != std::string::npos);
}
