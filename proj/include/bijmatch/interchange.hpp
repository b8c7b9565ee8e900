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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace bijmatch {

/*
 * Tensor file layout ("BMT1"), all integers little-endian:
 *
 *   offset 0   magic    4 bytes, ASCII "BMT1"
 *   offset 4   dtype    u8, 1 = float32, 2 = uint8
 *   offset 5   ndim     u8
 *   offset 6   dims     ndim x u32
 *   then       payload  product(dims) elements, row-major, last dim fastest
 *
 * Several tensors may be concatenated in one file (weights files do this).
 */

inline constexpr int kFormatVersion = 1;

enum class DType : std::uint8_t { f32 = 1, u8 = 2 };

struct Tensor {
    DType dtype = DType::f32;
    std::vector<std::uint32_t> dims;
    std::vector<float> f32;
    std::vector<std::uint8_t> u8;

    static Tensor of_floats(std::vector<std::uint32_t> dims, std::vector<float> values);
    static Tensor of_bytes(std::vector<std::uint32_t> dims, std::vector<std::uint8_t> values);

    std::size_t element_count() const noexcept;
    friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
/// Decodes one tensor starting at `offset` and advances it. Errors report the
/// absolute byte offset within `bytes`.
Tensor decode_tensor(std::span<const std::uint8_t> bytes, std::size_t& offset);

/// Throws InvalidInput for non-finite floats, IoError on write failure.
void write_tensor(const Tensor& t, const std::filesystem::path& path);
/// Exactly one tensor; trailing bytes are a format error.
Tensor read_tensor(const std::filesystem::path& path);
void write_tensors(std::span<const Tensor> ts, const std::filesystem::path& path);
std::vector<Tensor> read_tensors(const std::filesystem::path& path);

Tensor to_tensor(const FeatureMap& f);
FeatureMap to_feature_map(const Tensor& t);
/// H x W float tensor of a plane.
Tensor plane_tensor(std::span<const double> plane, Extent e);

// 8-bit grayscale PNG.
struct GrayImage {
    Extent extent;
    std::vector<std::uint8_t> pixels;
};
void write_gray_png(const GrayImage& img, const std::filesystem::path& path);
GrayImage read_gray_png(const std::filesystem::path& path);
/// Binary mask image: 0 or 255 on write, > 127 is foreground on read.
void write_mask_png(const BinaryMask& m, const std::filesystem::path& path);
BinaryMask read_mask_png(const std::filesystem::path& path);

/// Per-map affine rescale of [min, max] to [0, 255] with rounding; a constant
/// map becomes 128.
std::vector<std::uint8_t> score_map_gray(std::span<const double> y);
/// score_map_gray upscaled by `scale` with nearest neighbour, written as PNG.
void render_score_map(std::span<const double> y, Extent e, const std::filesystem::path& path, int scale = 16);

/// Contents of a bundle's manifest.txt.
struct BundleManifest {
    int version = kFormatVersion;
    int frames = 0;
    int objects = 0;
    int channels = 0;
    Extent feature;
    Extent full;
    std::vector<std::string> frame_files;   // relative to the bundle root
    std::vector<std::string> initial_masks; // gt/0000_objK.png, K = 1..objects
};

/// One video: features per frame and binary masks per object. Ground truth
/// beyond frame 0 is optional; `ground_truth[t]` is empty when absent.
struct SequenceBundle {
    BundleManifest manifest;
    std::vector<FeatureMap> frames;
    std::vector<std::vector<BinaryMask>> ground_truth;

    const std::vector<BinaryMask>& initial_masks() const { return ground_truth.at(0); }
    /// Label image for frame t built from per-object ground truth; overlaps
    /// resolve to the lowest object index.
    LabelMask ground_truth_labels(std::size_t t) const;
};

std::string frame_file_name(int t);               // frames/0007.bmt
std::string mask_file_name(int t, int object);    // gt/0007_obj2.png

/// Builds the manifest fields from the in-memory data.
BundleManifest make_manifest(const SequenceBundle& b);
void write_bundle(const SequenceBundle& b, const std::filesystem::path& dir);

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Checks manifest presence and syntax, frame numbering, and that every
/// referenced header agrees with the manifest. Lists every violation.
ValidationReport validate_bundle(const std::filesystem::path& dir);
/// validate_bundle, then loads. Throws ValidationError with every violation.
SequenceBundle read_bundle(const std::filesystem::path& dir);

} // namespace bijmatch
