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

#include "bijmatch/interchange.hpp"
#include "bijmatch/keyvalue.hpp"
#include "bijmatch/tensors.hpp"

#include <cstdint>
#include <vector>

namespace bijmatch {

/// Full-resolution pixels per feature-grid cell.
inline constexpr int kFeatureStride = 16;

enum class ShapeKind { rectangle, disk };

/// Geometry in feature-grid units. A rectangle covers [y, y+h) x [x, x+w);
/// a disk of diameter h is inscribed in that box (w is ignored).
struct ObjectSpec {
    ShapeKind shape = ShapeKind::rectangle;
    int size_h = 6;
    int size_w = 6;
    int y = 0;
    int x = 0;
    int vy = 0;
    int vx = 0;
};

/// A look-alike placed relative to an object's starting position. Hidden
/// before `enter_frame`.
struct DistractorSpec {
    bool same_appearance = true;
    int mimics = 1; // 1-based object index
    int offset_y = 0;
    int offset_x = 0;
    int vy = 0;
    int vx = 0;
    int enter_frame = 0;
};

struct SceneConfig {
    int frames = 10;
    Extent grid{24, 24};
    int channels = 32;
    std::vector<ObjectSpec> objects{ObjectSpec{}};
    std::vector<DistractorSpec> distractors;
    /// Per-channel standard deviation of the surface texture added to every
    /// base descriptor.
    double noise_sigma = 0.05;
    /// Spatial correlation length of that texture, in grid cells (0 = white).
    double texture_smoothing = 2.0;
    /// Side of the square background cells.
    int texture_cell = 6;
    std::uint64_t seed = 0;

    Extent full() const noexcept { return {grid.height * kFeatureStride, grid.width * kFeatureStride}; }
    /// Throws ConfigError.
    void validate() const;

    static SceneConfig from_doc(const KeyValueDoc& doc);
    KeyValueDoc to_doc() const;

    /// 24x24 grid, C = 32, one 6x6 target moving one cell per frame, and a
    /// same-appearance distractor of equal size that enters at frame 1.
    /// Positions and direction vary with the seed.
    static SceneConfig distractor_benchmark(std::uint64_t seed, int frames = 10, double noise_sigma = 0.05);
};

struct SyntheticScene {
    SequenceBundle bundle; // ground truth on every frame
    /// Per frame, per object: membership on the feature grid (after occlusion).
    std::vector<std::vector<BinaryMask>> object_cells;
    /// Per frame, per distractor: visible cells on the feature grid.
    std::vector<std::vector<BinaryMask>> distractor_cells;
};

/// Descriptors are base vectors per region plus a persistent surface texture
/// that moves with its object. Fully determined by the config.
SyntheticScene generate_scene(const SceneConfig& cfg);

/// Top-left corner of a track at frame t, clamped so the box stays inside.
std::pair<int, int> track_position(int y0, int x0, int vy, int vx, int size_h, int size_w, Extent grid, int t);

} // namespace bijmatch
