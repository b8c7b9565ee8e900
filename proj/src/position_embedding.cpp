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

#include "bijmatch/position_embedding.hpp"

#include "bijmatch/error.hpp"
#include "bijmatch/interchange.hpp"
#include "bijmatch/random.hpp"

#include <algorithm>
#include <cmath>

namespace bijmatch {

MaskStack stack_history(std::span<const ProbMask> history, int l, int target_h, int target_w) {
    if (history.empty())
        throw InvalidArgument("stack_history: empty mask history");
    if (l < 1)
        throw InvalidArgument("stack_history: history length must be >= 1");
    MaskStack stack;
    stack.history_length = l;
    stack.extent = {target_h, target_w};
    stack.planes.reserve(static_cast<std::size_t>(stack.channels()) * stack.extent.area());

    const auto n = static_cast<long>(history.size());
    for (long slot = 0; slot < l; ++slot) {
        // Slot l-1 is the newest mask; slots before the start of the history
        // repeat the oldest one.
        const long idx = std::max(0L, n - l + slot);
        const ProbMask pooled = downsample_mask(history[static_cast<std::size_t>(idx)], target_h, target_w);
        stack.planes.insert(stack.planes.end(), pooled.bg().begin(), pooled.bg().end());
        stack.planes.insert(stack.planes.end(), pooled.fg().begin(), pooled.fg().end());
    }
    const CoordChannels coords = coordinate_grid(target_h, target_w);
    stack.planes.insert(stack.planes.end(), coords.y_norm.begin(), coords.y_norm.end());
    stack.planes.insert(stack.planes.end(), coords.x_norm.begin(), coords.x_norm.end());
    stack.planes.insert(stack.planes.end(), coords.center_dist.begin(), coords.center_dist.end());
    return stack;
}

void ConvWeights::validate() const {
    std::vector<std::string> v;
    for (int j = 0; j < kLayers; ++j) {
        const ConvLayer& layer = layers[static_cast<std::size_t>(j)];
        const std::string name = "layer " + std::to_string(j);
        if (layer.out_channels < 1 || layer.in_channels < 1) {
            v.push_back(name + ": channel counts must be positive");
            continue;
        }
        const auto want = static_cast<std::size_t>(layer.out_channels) * layer.in_channels * 9;
        if (layer.kernel.size() != want)
            v.push_back(name + ": kernel has " + std::to_string(layer.kernel.size()) + " values, expected " +
                        std::to_string(want));
        if (layer.bias.size() != static_cast<std::size_t>(layer.out_channels))
            v.push_back(name + ": bias has " + std::to_string(layer.bias.size()) + " values, expected " +
                        std::to_string(layer.out_channels));
        if (j + 1 < kLayers && layer.out_channels != layers[static_cast<std::size_t>(j + 1)].in_channels)
            v.push_back(name + " outputs " + std::to_string(layer.out_channels) + " channels but layer " +
                        std::to_string(j + 1) + " expects " +
                        std::to_string(layers[static_cast<std::size_t>(j + 1)].in_channels));
        const bool finite = std::all_of(layer.kernel.begin(), layer.kernel.end(), [](float x) { return std::isfinite(x); }) &&
                            std::all_of(layer.bias.begin(), layer.bias.end(), [](float x) { return std::isfinite(x); });
        if (!finite)
            v.push_back(name + ": non-finite weight");
    }
    if (!v.empty())
        throw ValidationError(std::move(v));
}

ConvWeights init_weights(std::uint64_t seed, const EmbeddingShape& shape) {
    if (shape.history_length < 1 || shape.output_channels < 1 ||
        std::any_of(shape.hidden_widths.begin(), shape.hidden_widths.end(), [](int w) { return w < 1; }))
        throw InvalidArgument("init_weights: widths and history length must be positive");
    const std::array<int, 5> chain{2 * shape.history_length + 3, shape.hidden_widths[0], shape.hidden_widths[1],
                                   shape.hidden_widths[2], shape.output_channels};
    Rng rng(seed);
    ConvWeights w;
    for (int j = 0; j < ConvWeights::kLayers; ++j) {
        ConvLayer& layer = w.layers[static_cast<std::size_t>(j)];
        layer.in_channels = chain[static_cast<std::size_t>(j)];
        layer.out_channels = chain[static_cast<std::size_t>(j + 1)];
        const double a = std::sqrt(1.0 / (layer.in_channels * 9.0));
        layer.kernel.resize(static_cast<std::size_t>(layer.out_channels) * layer.in_channels * 9);
        for (float& k : layer.kernel)
            k = static_cast<float>(rng.uniform(-a, a));
        layer.bias.resize(static_cast<std::size_t>(layer.out_channels));
        for (float& b : layer.bias)
            b = static_cast<float>(rng.uniform(-a, a));
    }
    return w;
}

void save_weights(const ConvWeights& w, const std::filesystem::path& path) {
    w.validate();
    std::vector<Tensor> ts;
    for (const ConvLayer& layer : w.layers) {
        ts.push_back(Tensor::of_floats({static_cast<std::uint32_t>(layer.out_channels),
                                        static_cast<std::uint32_t>(layer.in_channels), 3, 3},
                                       layer.kernel));
        ts.push_back(Tensor::of_floats({static_cast<std::uint32_t>(layer.out_channels)}, layer.bias));
    }
    write_tensors(ts, path);
}

ConvWeights load_weights(const std::filesystem::path& path) {
    const std::vector<Tensor> ts = read_tensors(path);
    std::vector<std::string> v;
    if (ts.size() != 2 * ConvWeights::kLayers)
        throw ValidationError(path.string() + ": expected " + std::to_string(2 * ConvWeights::kLayers) +
                              " tensors (kernel, bias per layer), found " + std::to_string(ts.size()));
    ConvWeights w;
    for (int j = 0; j < ConvWeights::kLayers; ++j) {
        const Tensor& k = ts[static_cast<std::size_t>(2 * j)];
        const Tensor& b = ts[static_cast<std::size_t>(2 * j + 1)];
        const std::string name = "layer " + std::to_string(j);
        if (k.dtype != DType::f32 || k.dims.size() != 4 || k.dims[2] != 3 || k.dims[3] != 3) {
            v.push_back(name + ": kernel must be float32 (out,in,3,3)");
            continue;
        }
        if (b.dtype != DType::f32 || b.dims.size() != 1) {
            v.push_back(name + ": bias must be a float32 vector");
            continue;
        }
        ConvLayer& layer = w.layers[static_cast<std::size_t>(j)];
        layer.out_channels = static_cast<int>(k.dims[0]);
        layer.in_channels = static_cast<int>(k.dims[1]);
        layer.kernel = k.f32;
        layer.bias = b.f32;
    }
    if (!v.empty())
        throw ValidationError(std::move(v));
    w.validate();
    return w;
}

ConvWeights load_weights(const std::filesystem::path& path, int history_length) {
    ConvWeights w = load_weights(path);
    if (w.input_channels() != 2 * history_length + 3)
        throw ValidationError(path.string() + ": first layer takes " + std::to_string(w.input_channels()) +
                              " channels, history length " + std::to_string(history_length) + " needs " +
                              std::to_string(2 * history_length + 3));
    return w;
}

namespace {

// 3x3, stride 1, zero padding, then ReLU. `in` is channel-major.
std::vector<double> conv3x3_relu(const std::vector<double>& in, Extent e, const ConvLayer& layer) {
    const int h = e.height;
    const int w = e.width;
    const std::size_t plane = e.area();
    std::vector<double> out(static_cast<std::size_t>(layer.out_channels) * plane);
    for (int o = 0; o < layer.out_channels; ++o) {
        double* dst = out.data() + static_cast<std::size_t>(o) * plane;
        std::fill(dst, dst + plane, static_cast<double>(layer.bias[static_cast<std::size_t>(o)]));
        for (int i = 0; i < layer.in_channels; ++i) {
            const double* src = in.data() + static_cast<std::size_t>(i) * plane;
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    const double wt = layer.weight(o, i, ky, kx);
                    if (wt == 0.0)
                        continue;
                    const int dy = ky - 1;
                    const int dx = kx - 1;
                    const int y0 = std::max(0, -dy);
                    const int y1 = std::min(h, h - dy);
                    const int x0 = std::max(0, -dx);
                    const int x1 = std::min(w, w - dx);
                    for (int y = y0; y < y1; ++y) {
                        double* drow = dst + static_cast<std::size_t>(y) * w;
                        const double* srow = src + static_cast<std::size_t>(y + dy) * w + dx;
                        for (int x = x0; x < x1; ++x)
                            drow[x] += wt * srow[x];
                    }
                }
            }
        }
        for (std::size_t p = 0; p < plane; ++p)
            dst[p] = std::max(dst[p], 0.0);
    }
    return out;
}

} // namespace

PositionFeatures embed_position_features(const MaskStack& stack, const ConvWeights& w) {
    if (stack.channels() != w.input_channels())
        throw InvalidArgument("embed_position_features: stack has " + std::to_string(stack.channels()) +
                              " channels, weights expect " + std::to_string(w.input_channels()));
    if (stack.planes.size() != static_cast<std::size_t>(stack.channels()) * stack.extent.area())
        throw InvalidArgument("embed_position_features: stack planes do not match its shape");
    std::vector<double> act = stack.planes;
    for (const ConvLayer& layer : w.layers)
        act = conv3x3_relu(act, stack.extent, layer);
    return {w.output_channels(), stack.extent, std::move(act)};
}

} // namespace bijmatch
