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

#include "bijmatch/tensors.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace bijmatch {

/// L historic masks as (bg, fg) plane pairs, oldest first, followed by the
/// y, x and center-distance coordinate planes. 2L + 3 planes in total.
struct MaskStack {
    int history_length = 0;
    Extent extent;
    std::vector<double> planes;

    int channels() const noexcept { return 2 * history_length + 3; }
    std::span<const double> plane(int c) const noexcept {
        return std::span<const double>(planes).subspan(static_cast<std::size_t>(c) * extent.area(), extent.area());
    }
};

/// One 3x3 convolution: kernel is out x in x 3 x 3, bias is out.
struct ConvLayer {
    int out_channels = 0;
    int in_channels = 0;
    std::vector<float> kernel;
    std::vector<float> bias;

    float weight(int o, int i, int ky, int kx) const noexcept {
        return kernel[((static_cast<std::size_t>(o) * in_channels + i) * 3 + ky) * 3 + kx];
    }
    friend bool operator==(const ConvLayer&, const ConvLayer&) = default;
};

struct ConvWeights {
    static constexpr int kLayers = 4;
    std::array<ConvLayer, kLayers> layers;

    int input_channels() const noexcept { return layers[0].in_channels; }
    int output_channels() const noexcept { return layers[kLayers - 1].out_channels; }
    /// Throws ValidationError listing every broken shape or chain link and
    /// any non-finite value.
    void validate() const;
    friend bool operator==(const ConvWeights&, const ConvWeights&) = default;
};

/// Post-ReLU output of the embedding stack; channel-major.
struct PositionFeatures {
    int channels = 0;
    Extent extent;
    std::vector<double> data;
};

struct EmbeddingShape {
    int history_length = 3;
    std::array<int, 3> hidden_widths{32, 32, 32};
    int output_channels = 32;
};

/// Most recent `l` masks of `history` (oldest-first order), padded at the
/// front by repeating the oldest mask, each pooled to the target grid, then
/// the coordinate planes.
MaskStack stack_history(std::span<const ProbMask> history, int l, int target_h, int target_w);

/// Uniform weights in [-a, a], a = sqrt(1 / (in * 9)), per layer, from a
/// 64-bit seed. Bit-identical for a given seed on every platform.
ConvWeights init_weights(std::uint64_t seed, const EmbeddingShape& shape = {});

/// Eight tensors in layer order: kernel0, bias0, kernel1, bias1, ...
void save_weights(const ConvWeights& w, const std::filesystem::path& path);
ConvWeights load_weights(const std::filesystem::path& path);
/// Additionally checks that the first layer accepts 2L + 3 channels.
ConvWeights load_weights(const std::filesystem::path& path, int history_length);

/// Four 3x3 zero-padded convolutions, each followed by ReLU.
PositionFeatures embed_position_features(const MaskStack& stack, const ConvWeights& w);

} // namespace bijmatch
