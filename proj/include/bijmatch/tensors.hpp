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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bijmatch {

/// Height x width of a 2D grid.
struct Extent {
    int height = 0;
    int width = 0;

    std::size_t area() const noexcept {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    bool valid() const noexcept { return height > 0 && width > 0; }
    std::string to_string() const;
    friend bool operator==(const Extent&, const Extent&) = default;
};

/// C x H x W per-pixel descriptors, channel-major (c, then h, then w).
/// Stored in single precision, matching the interchange format.
class FeatureMap {
public:
    FeatureMap() = default;
    /// Zero-filled map.
    FeatureMap(int channels, Extent extent);
    /// Throws InvalidArgument on a size mismatch and InvalidInput on a
    /// non-finite value.
    FeatureMap(int channels, Extent extent, std::vector<float> data);

    int channels() const noexcept { return channels_; }
    Extent extent() const noexcept { return extent_; }
    int height() const noexcept { return extent_.height; }
    int width() const noexcept { return extent_.width; }
    std::size_t pixels() const noexcept { return extent_.area(); }

    std::span<const float> data() const noexcept { return data_; }
    std::span<float> data() noexcept { return data_; }
    std::span<const float> plane(int c) const noexcept {
        return std::span<const float>(data_).subspan(static_cast<std::size_t>(c) * pixels(), pixels());
    }
    float at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }
    float& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }

    friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
    std::size_t index(int c, int y, int x) const noexcept {
        return (static_cast<std::size_t>(c) * extent_.height + y) * extent_.width + x;
    }
    int channels_ = 0;
    Extent extent_;
    std::vector<float> data_;
};

/// Two-class per-pixel probabilities: background and foreground planes that
/// sum to one at every pixel.
class ProbMask {
public:
    static constexpr double kSumTolerance = 1e-6;

    ProbMask() = default;
    /// Validates ranges and the bg + fg == 1 constraint.
    ProbMask(Extent extent, std::vector<double> bg, std::vector<double> fg);
    /// bg is derived as 1 - fg.
    static ProbMask from_foreground(Extent extent, std::vector<double> fg);
    /// Hard mask from a 0/1 plane.
    static ProbMask from_binary(Extent extent, std::span<const std::uint8_t> bits);

    Extent extent() const noexcept { return extent_; }
    int height() const noexcept { return extent_.height; }
    int width() const noexcept { return extent_.width; }
    std::span<const double> bg() const noexcept { return bg_; }
    std::span<const double> fg() const noexcept { return fg_; }
    double fg_at(int y, int x) const noexcept { return fg_[static_cast<std::size_t>(y) * extent_.width + x]; }
    double bg_at(int y, int x) const noexcept { return bg_[static_cast<std::size_t>(y) * extent_.width + x]; }

    friend bool operator==(const ProbMask&, const ProbMask&) = default;

private:
    Extent extent_;
    std::vector<double> bg_;
    std::vector<double> fg_;
};

/// 0/1 plane used for ground truth and metric inputs.
struct BinaryMask {
    Extent extent;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    explicit BinaryMask(Extent e) : extent(e), bits(e.area(), 0) {}
    BinaryMask(Extent e, std::vector<std::uint8_t> b);

    bool at(int y, int x) const noexcept { return bits[static_cast<std::size_t>(y) * extent.width + x] != 0; }
    void set(int y, int x, bool v) noexcept { bits[static_cast<std::size_t>(y) * extent.width + x] = v ? 1 : 0; }
    std::size_t count() const noexcept;
    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Hard multi-object assignment: 0 is background, k is object k.
struct LabelMask {
    Extent extent;
    std::vector<std::uint8_t> labels;

    LabelMask() = default;
    explicit LabelMask(Extent e) : extent(e), labels(e.area(), 0) {}
    LabelMask(Extent e, std::vector<std::uint8_t> l);

    std::uint8_t at(int y, int x) const noexcept { return labels[static_cast<std::size_t>(y) * extent.width + x]; }
    int max_label() const noexcept;
    BinaryMask object(int k) const;
    friend bool operator==(const LabelMask&, const LabelMask&) = default;
};

/// Normalized coordinate planes appended to the mask history.
struct CoordChannels {
    Extent extent;
    std::vector<double> y_norm;      // [-1, 1], constant along a row
    std::vector<double> x_norm;      // [-1, 1], constant along a column
    std::vector<double> center_dist; // [0, 1]
};

/// L2-normalizes every pixel's channel vector. Vectors with norm below 1e-12
/// map to zero.
FeatureMap normalize_channels(const FeatureMap& f);

/// Area-average pooling of both planes onto a coarser grid. Non-integer
/// ratios use fractional footprints.
ProbMask downsample_mask(const ProbMask& m, int target_h, int target_w);

/// Bilinear upsampling (half-pixel centers, edge clamped) followed by
/// per-pixel renormalization.
ProbMask upsample_probmask(const ProbMask& m, int target_h, int target_w);

/// Bilinear resampling of a single plane with the same convention as
/// upsample_probmask. Any target size is accepted.
std::vector<double> resize_bilinear(std::span<const double> plane, Extent from, Extent to);

CoordChannels coordinate_grid(int h, int w);

} // namespace bijmatch
