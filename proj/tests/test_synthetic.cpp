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
#include "bijmatch/interchange.hpp"
#include "bijmatch/pipeline.hpp"
#include "bijmatch/synthetic.hpp"

#include <doctest.h>

#include <filesystem>

using namespace bijmatch;
namespace fs = std::filesystem;

namespace {

std::vector<float> descriptor(const FeatureMap& f, int y, int x) {
    std::vector<float> v;
    for (int c = 0; c < f.channels(); ++c)
        v.push_back(f.at(c, y, x));
    return v;
}

SceneConfig look_alike(double noise) {
    SceneConfig cfg;
    cfg.frames = 4;
    cfg.grid = {16, 16};
    cfg.channels = 16;
    cfg.noise_sigma = noise;
    cfg.objects = {ObjectSpec{ShapeKind::rectangle, 4, 4, 1, 1, 1, 0}};
    DistractorSpec d;
    d.offset_y = 8;
    d.vx = 1;
    cfg.distractors = {d};
    return cfg;
}

} // namespace

TEST_CASE("noise-free look-alike shares the target descriptor") {
    const SyntheticScene s = generate_scene(look_alike(0.0));
    const FeatureMap& f = s.bundle.frames[2];
    // Object at (1,1) moving down, look-alike at (9,1) moving right.
    const auto target = descriptor(f, 3, 1);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            CHECK(descriptor(f, 3 + y, 1 + x) == target);
            CHECK(descriptor(f, 9 + y, 3 + x) == target);
        }
    }
    CHECK(s.distractor_cells[2][0].count() == 16);
    CHECK(s.object_cells[2][0].count() == 16);
}

TEST_CASE("same seed, same bundle; different seed, different features") {
    const SyntheticScene a = generate_scene(look_alike(0.05));
    const SyntheticScene b = generate_scene(look_alike(0.05));
    CHECK(a.bundle.frames == b.bundle.frames);
    CHECK(a.bundle.ground_truth == b.bundle.ground_truth);
    SceneConfig other = look_alike(0.05);
    other.seed = 9;
    CHECK_FALSE(generate_scene(other).bundle.frames == a.bundle.frames);
}

TEST_CASE("ground truth follows the declared trajectory") {
    SceneConfig cfg;
    cfg.frames = 6;
    cfg.grid = {10, 12};
    cfg.objects = {ObjectSpec{ShapeKind::rectangle, 3, 4, 2, 6, 1, 2}, ObjectSpec{ShapeKind::disk, 4, 4, 5, 0, -1, 0}};
    const SyntheticScene s = generate_scene(cfg);
    const Extent full = cfg.full();
    for (int t = 0; t < cfg.frames; ++t) {
        const auto [ry, rx] = track_position(2, 6, 1, 2, 3, 4, cfg.grid, t);
        const auto [dy, dx] = track_position(5, 0, -1, 0, 4, 4, cfg.grid, t);
        CHECK(ry + 3 <= cfg.grid.height);
        CHECK(rx + 4 <= cfg.grid.width);
        const auto& gt = s.bundle.ground_truth[static_cast<std::size_t>(t)];
        REQUIRE(gt.size() == 2);
        for (int Y = 0; Y < full.height; Y += 3) {
            for (int X = 0; X < full.width; X += 3) {
                const double py = (Y + 0.5) / kFeatureStride;
                const double px = (X + 0.5) / kFeatureStride;
                const double cy = py - (dy + 2.0);
                const double cx = px - (dx + 2.0);
                const bool in_disk = cy * cy + cx * cx <= 4.0;
                const bool in_rect = py >= ry && py < ry + 3 && px >= rx && px < rx + 4 && !in_disk;
                CHECK(gt[1].at(Y, X) == in_disk);
                CHECK(gt[0].at(Y, X) == in_rect);
            }
        }
    }
}

TEST_CASE("motion is clamped to the grid") {
    CHECK(track_position(0, 0, 5, -5, 4, 4, {10, 10}, 3) == std::pair<int, int>{6, 0});
    CHECK(track_position(2, 2, 1, 1, 3, 3, {10, 10}, 2) == std::pair<int, int>{4, 4});
}

TEST_CASE("generated bundles validate and feed the pipeline") {
    const fs::path dir = fs::temp_directory_path() / "bijmatch_unit" / "synth_bundle";
    fs::remove_all(dir);
    const SyntheticScene s = generate_scene(SceneConfig::distractor_benchmark(3));
    write_bundle(s.bundle, dir);
    CHECK(validate_bundle(dir).ok());

    SceneConfig one = look_alike(0.05);
    one.frames = 1;
    const SyntheticScene single = generate_scene(one);
    const auto preds = run_sequence(single.bundle, PipelineConfig{});
    REQUIRE(preds.size() == 1);
    CHECK(preds[0].labels == single.bundle.ground_truth_labels(0));
}

TEST_CASE("distractor enters late") {
    const SceneConfig cfg = SceneConfig::distractor_benchmark(0);
    CHECK(cfg.distractors.size() == 1);
    CHECK(cfg.distractors[0].enter_frame == 1);
    const SyntheticScene s = generate_scene(cfg);
    CHECK(s.distractor_cells[0][0].count() == 0);
    CHECK(s.distractor_cells[1][0].count() > 0);
}

TEST_CASE("scene config text round trip and validation") {
    SceneConfig cfg = look_alike(0.125);
    cfg.seed = 77;
    cfg.distractors[0].same_appearance = false;
    cfg.distractors[0].enter_frame = 2;
    cfg.objects[0].shape = ShapeKind::disk;
    const SceneConfig back = SceneConfig::from_doc(KeyValueDoc::parse(cfg.to_doc().to_string()));
    CHECK(back.to_doc().to_string() == cfg.to_doc().to_string());
    CHECK(generate_scene(back).bundle.frames == generate_scene(cfg).bundle.frames);

    CHECK_THROWS_AS(SceneConfig::from_doc(KeyValueDoc::parse("frames = 0\n")), ConfigError);
    CHECK_THROWS_AS(SceneConfig::from_doc(KeyValueDoc::parse("height = 4\nobject1.size = 5 5\n")), ConfigError);
    CHECK_THROWS_AS(SceneConfig::from_doc(KeyValueDoc::parse("object1.shape = blob\n")), ConfigError);
    CHECK_THROWS_AS(SceneConfig::from_doc(KeyValueDoc::parse("distractors = 1\ndistractor1.mimics = 3\n")),
                    ConfigError);
    CHECK_THROWS_AS(SceneConfig::from_doc(KeyValueDoc::parse("noise_sigma = -1\n")), ConfigError);
}
