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

#include "bijmatch/interchange.hpp"

#include "bijmatch/error.hpp"
#include "bijmatch/keyvalue.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <set>

namespace bijmatch {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'B', 'M', 'T', '1'};
constexpr std::size_t kFixedHeader = 6;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<std::uint8_t> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed: " + path.string());
}

std::size_t dtype_size(DType d) {
    return d == DType::f32 ? 4 : 1;
}

// Shared by decode_tensor and bundle validation.
struct TensorHeader {
    DType dtype;
    std::vector<std::uint32_t> dims;
};

TensorHeader decode_header(std::span<const std::uint8_t> bytes, std::size_t& offset) {
    const std::size_t start = offset;
    if (bytes.size() - offset < kFixedHeader)
        throw FormatError(bytes.size(), "truncated tensor header");
    if (std::memcmp(bytes.data() + offset, kMagic, 4) != 0)
        throw FormatError(start, "bad magic, expected \"BMT1\"");
    const std::uint8_t code = bytes[offset + 4];
    if (code != 1 && code != 2)
        throw FormatError(start + 4, "unknown dtype code " + std::to_string(code));
    const std::uint8_t ndim = bytes[offset + 5];
    offset += kFixedHeader;
    if (bytes.size() - offset < 4u * ndim)
        throw FormatError(bytes.size(), "truncated dimension list");
    TensorHeader h{static_cast<DType>(code), {}};
    for (std::uint8_t i = 0; i < ndim; ++i) {
        h.dims.push_back(get_u32(bytes.data() + offset));
        offset += 4;
    }
    return h;
}

std::size_t product(const std::vector<std::uint32_t>& dims) {
    std::size_t n = 1;
    for (auto d : dims)
        n *= d;
    return n;
}

std::string dims_string(const std::vector<std::uint32_t>& dims) {
    std::string s = "(";
    for (std::size_t i = 0; i < dims.size(); ++i)
        s += (i ? "," : "") + std::to_string(dims[i]);
    return s + ")";
}

} // namespace

Tensor Tensor::of_floats(std::vector<std::uint32_t> dims, std::vector<float> values) {
    if (product(dims) != values.size())
        throw InvalidArgument("tensor: " + std::to_string(values.size()) + " values for dims " + dims_string(dims));
    Tensor t;
    t.dtype = DType::f32;
    t.dims = std::move(dims);
    t.f32 = std::move(values);
    return t;
}

Tensor Tensor::of_bytes(std::vector<std::uint32_t> dims, std::vector<std::uint8_t> values) {
    if (product(dims) != values.size())
        throw InvalidArgument("tensor: " + std::to_string(values.size()) + " values for dims " + dims_string(dims));
    Tensor t;
    t.dtype = DType::u8;
    t.dims = std::move(dims);
    t.u8 = std::move(values);
    return t;
}

std::size_t Tensor::element_count() const noexcept {
    return product(dims);
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
    if (t.dims.size() > 255)
        throw InvalidArgument("tensor rank exceeds 255");
    const std::size_t n = t.element_count();
    if ((t.dtype == DType::f32 ? t.f32.size() : t.u8.size()) != n)
        throw InvalidArgument("tensor payload does not match dims " + dims_string(t.dims));
    std::vector<std::uint8_t> out(kMagic, kMagic + 4);
    out.push_back(static_cast<std::uint8_t>(t.dtype));
    out.push_back(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims)
        put_u32(out, d);
    out.reserve(out.size() + n * dtype_size(t.dtype));
    if (t.dtype == DType::u8) {
        out.insert(out.end(), t.u8.begin(), t.u8.end());
    } else {
        for (float v : t.f32)
            put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes, std::size_t& offset) {
    TensorHeader h = decode_header(bytes, offset);
    const std::size_t n = product(h.dims);
    const std::size_t payload = n * dtype_size(h.dtype);
    if (bytes.size() - offset < payload)
        throw FormatError(bytes.size(), "truncated payload: dims " + dims_string(h.dims) + " need " +
                                            std::to_string(payload) + " bytes, " +
                                            std::to_string(bytes.size() - offset) + " available");
    Tensor t;
    t.dtype = h.dtype;
    t.dims = std::move(h.dims);
    if (t.dtype == DType::u8) {
        t.u8.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                    bytes.begin() + static_cast<std::ptrdiff_t>(offset + n));
    } else {
        t.f32.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            t.f32[i] = std::bit_cast<float>(get_u32(bytes.data() + offset + 4 * i));
    }
    offset += payload;
    return t;
}

void write_tensors(std::span<const Tensor> ts, const fs::path& path) {
    std::vector<std::uint8_t> bytes;
    for (const Tensor& t : ts) {
        if (t.dtype == DType::f32)
            for (float v : t.f32)
                if (!std::isfinite(v))
                    throw InvalidInput("write_tensor: non-finite value");
        const auto enc = encode_tensor(t);
        bytes.insert(bytes.end(), enc.begin(), enc.end());
    }
    spill(path, bytes);
}

void write_tensor(const Tensor& t, const fs::path& path) {
    write_tensors(std::span<const Tensor>(&t, 1), path);
}

std::vector<Tensor> read_tensors(const fs::path& path) {
    const auto bytes = slurp(path);
    std::vector<Tensor> out;
    std::size_t offset = 0;
    try {
        while (offset < bytes.size())
            out.push_back(decode_tensor(bytes, offset));
    } catch (const FormatError& e) {
        throw FormatError(e.offset(), path.string() + ": " + e.detail());
    }
    return out;
}

Tensor read_tensor(const fs::path& path) {
    const auto bytes = slurp(path);
    std::size_t offset = 0;
    Tensor t;
    try {
        t = decode_tensor(bytes, offset);
    } catch (const FormatError& e) {
        throw FormatError(e.offset(), path.string() + ": " + e.detail());
    }
    if (offset != bytes.size())
        throw FormatError(offset, path.string() + ": trailing bytes after tensor payload");
    return t;
}

Tensor to_tensor(const FeatureMap& f) {
    return Tensor::of_floats({static_cast<std::uint32_t>(f.channels()), static_cast<std::uint32_t>(f.height()),
                              static_cast<std::uint32_t>(f.width())},
                             std::vector<float>(f.data().begin(), f.data().end()));
}

FeatureMap to_feature_map(const Tensor& t) {
    if (t.dtype != DType::f32 || t.dims.size() != 3)
        throw InvalidArgument("feature tensor must be float32 with dims (C,H,W), got rank " +
                              std::to_string(t.dims.size()));
    return FeatureMap(static_cast<int>(t.dims[0]), {static_cast<int>(t.dims[1]), static_cast<int>(t.dims[2])},
                      t.f32);
}

Tensor plane_tensor(std::span<const double> plane, Extent e) {
    std::vector<float> v(plane.begin(), plane.end());
    return Tensor::of_floats({static_cast<std::uint32_t>(e.height), static_cast<std::uint32_t>(e.width)},
                             std::move(v));
}

// ---------------------------------------------------------------------------
// PNG

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; these two keep every C++ object out
// of the setjmp frame and return false on failure.
bool png_write_rows(std::FILE* fp, const GrayImage& img) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        return false;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.extent.width), static_cast<png_uint_32>(img.extent.height),
                 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.extent.height; ++y)
        png_write_row(png, img.pixels.data() + static_cast<std::size_t>(y) * img.extent.width);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

// Reads an 8-bit grayscale (or convertible) image into `pixels`, which the
// caller sizes after the header callback fills `extent`.
bool png_read_gray(std::FILE* fp, int& height, int& width, std::vector<std::uint8_t>* pixels,
                   std::vector<png_bytep>* rows) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        return false;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    const auto depth = png_get_bit_depth(png, info);
    if (depth == 16)
        png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (color & PNG_COLOR_MASK_ALPHA)
        png_set_strip_alpha(png);
    png_read_update_info(png, info);
    height = static_cast<int>(png_get_image_height(png, info));
    width = static_cast<int>(png_get_image_width(png, info));
    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(width)) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    pixels->resize(static_cast<std::size_t>(height) * static_cast<std::size_t>(width));
    rows->resize(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        (*rows)[static_cast<std::size_t>(y)] = pixels->data() + static_cast<std::size_t>(y) * width;
    png_read_image(png, rows->data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

} // namespace

void write_gray_png(const GrayImage& img, const fs::path& path) {
    if (!img.extent.valid() || img.pixels.size() != img.extent.area())
        throw InvalidArgument("write_gray_png: pixel buffer does not match " + img.extent.to_string());
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp)
        throw IoError("cannot write " + path.string());
    if (!png_write_rows(fp.get(), img))
        throw IoError("png encode failed: " + path.string());
}

GrayImage read_gray_png(const fs::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp)
        throw IoError("cannot open " + path.string());
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw FormatError(0, path.string() + ": not a PNG file");
    GrayImage img;
    std::vector<png_bytep> rows;
    if (!png_read_gray(fp.get(), img.extent.height, img.extent.width, &img.pixels, &rows))
        throw FormatError(8, path.string() + ": corrupt or unsupported PNG");
    return img;
}

void write_mask_png(const BinaryMask& m, const fs::path& path) {
    GrayImage img{m.extent, std::vector<std::uint8_t>(m.bits.size())};
    for (std::size_t i = 0; i < m.bits.size(); ++i)
        img.pixels[i] = m.bits[i] ? 255 : 0;
    write_gray_png(img, path);
}

BinaryMask read_mask_png(const fs::path& path) {
    GrayImage img = read_gray_png(path);
    BinaryMask m(img.extent);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        m.bits[i] = img.pixels[i] > 127 ? 1 : 0;
    return m;
}

std::vector<std::uint8_t> score_map_gray(std::span<const double> y) {
    std::vector<std::uint8_t> out(y.size(), 128);
    if (y.empty())
        return out;
    for (double v : y)
        if (!std::isfinite(v))
            throw InvalidInput("render_score_map: non-finite score");
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double range = *hi - *lo;
    if (!(range > 0.0))
        return out;
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] = static_cast<std::uint8_t>(std::lround(std::clamp((y[i] - *lo) / range, 0.0, 1.0) * 255.0));
    return out;
}

void render_score_map(std::span<const double> y, Extent e, const fs::path& path, int scale) {
    if (y.size() != e.area())
        throw InvalidArgument("render_score_map: map does not match " + e.to_string());
    if (scale < 1)
        throw InvalidArgument("render_score_map: scale must be >= 1");
    const auto gray = score_map_gray(y);
    GrayImage img{{e.height * scale, e.width * scale}, {}};
    img.pixels.resize(img.extent.area());
    for (int r = 0; r < img.extent.height; ++r)
        for (int c = 0; c < img.extent.width; ++c)
            img.pixels[static_cast<std::size_t>(r) * img.extent.width + c] =
                gray[static_cast<std::size_t>(r / scale) * e.width + c / scale];
    write_gray_png(img, path);
}

// ---------------------------------------------------------------------------
// Bundles

std::string frame_file_name(int t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frames/%04d.bmt", t);
    return buf;
}

std::string mask_file_name(int t, int object) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "gt/%04d_obj%d.png", t, object);
    return buf;
}

LabelMask SequenceBundle::ground_truth_labels(std::size_t t) const {
    const auto& masks = ground_truth.at(t);
    if (masks.empty())
        throw InvalidArgument("no ground truth for frame " + std::to_string(t));
    LabelMask out(masks.front().extent);
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
        for (std::size_t k = 0; k < masks.size(); ++k) {
            if (masks[k].bits[i]) {
                out.labels[i] = static_cast<std::uint8_t>(k + 1);
                break;
            }
        }
    }
    return out;
}

BundleManifest make_manifest(const SequenceBundle& b) {
    BundleManifest m;
    m.frames = static_cast<int>(b.frames.size());
    m.objects = b.ground_truth.empty() ? 0 : static_cast<int>(b.ground_truth.front().size());
    if (!b.frames.empty()) {
        m.channels = b.frames.front().channels();
        m.feature = b.frames.front().extent();
    }
    if (m.objects > 0)
        m.full = b.ground_truth.front().front().extent;
    for (int t = 0; t < m.frames; ++t)
        m.frame_files.push_back(frame_file_name(t));
    for (int k = 1; k <= m.objects; ++k)
        m.initial_masks.push_back(mask_file_name(0, k));
    return m;
}

namespace {

KeyValueDoc manifest_doc(const BundleManifest& m) {
    KeyValueDoc doc;
    doc.set("format_version", m.version);
    doc.set("frames", m.frames);
    doc.set("objects", m.objects);
    doc.set("channels", m.channels);
    doc.set("height", m.feature.height);
    doc.set("width", m.feature.width);
    doc.set("full_height", m.full.height);
    doc.set("full_width", m.full.width);
    std::string files;
    for (const auto& f : m.frame_files)
        files += (files.empty() ? "" : " ") + f;
    doc.set("frame_files", files);
    std::string masks;
    for (const auto& f : m.initial_masks)
        masks += (masks.empty() ? "" : " ") + f;
    doc.set("initial_masks", masks);
    return doc;
}

// Parses the manifest, appending problems to `v`. Returns false if the
// manifest is unusable for further checks.
bool parse_manifest(const fs::path& dir, BundleManifest& m, std::vector<std::string>& v) {
    const fs::path file = dir / "manifest.txt";
    if (!fs::exists(file)) {
        v.push_back("missing manifest: " + file.string());
        return false;
    }
    KeyValueDoc doc;
    try {
        doc = KeyValueDoc::load(file);
    } catch (const Error& e) {
        v.push_back(std::string("unreadable manifest: ") + e.what());
        return false;
    }
    bool ok = true;
    auto read_int = [&](const char* key, int& dst, int min) {
        try {
            dst = doc.require_int(key);
            if (dst < min) {
                v.push_back(std::string("manifest ") + key + " = " + std::to_string(dst) + " must be >= " +
                            std::to_string(min));
                ok = false;
            }
        } catch (const ConfigError& e) {
            v.push_back(std::string("manifest: ") + e.what());
            ok = false;
        }
    };
    read_int("format_version", m.version, 1);
    if (ok && m.version != kFormatVersion)
        v.push_back("unsupported format_version " + std::to_string(m.version));
    read_int("frames", m.frames, 1);
    read_int("objects", m.objects, 1);
    read_int("channels", m.channels, 1);
    read_int("height", m.feature.height, 1);
    read_int("width", m.feature.width, 1);
    read_int("full_height", m.full.height, 1);
    read_int("full_width", m.full.width, 1);
    if (m.objects > 255) {
        v.push_back("manifest objects = " + std::to_string(m.objects) + " exceeds 255");
        ok = false;
    }
    if (auto f = doc.get("frame_files"))
        m.frame_files = split_words(*f);
    else {
        v.push_back("manifest: missing key 'frame_files'");
        ok = false;
    }
    if (auto f = doc.get("initial_masks"))
        m.initial_masks = split_words(*f);
    else {
        v.push_back("manifest: missing key 'initial_masks'");
        ok = false;
    }
    return ok;
}

} // namespace

void write_bundle(const SequenceBundle& b, const fs::path& dir) {
    const BundleManifest m = make_manifest(b);
    fs::create_directories(dir / "frames");
    fs::create_directories(dir / "gt");
    for (int t = 0; t < m.frames; ++t)
        write_tensor(to_tensor(b.frames[static_cast<std::size_t>(t)]), dir / m.frame_files[static_cast<std::size_t>(t)]);
    for (std::size_t t = 0; t < b.ground_truth.size(); ++t)
        for (std::size_t k = 0; k < b.ground_truth[t].size(); ++k)
            write_mask_png(b.ground_truth[t][k], dir / mask_file_name(static_cast<int>(t), static_cast<int>(k + 1)));
    manifest_doc(m).save(dir / "manifest.txt");
}

ValidationReport validate_bundle(const fs::path& dir) {
    ValidationReport report;
    auto& v = report.violations;
    if (!fs::is_directory(dir)) {
        v.push_back("not a directory: " + dir.string());
        return report;
    }
    BundleManifest m;
    if (!parse_manifest(dir, m, v))
        return report;

    // Frame numbering on disk: contiguous from 0000, and in agreement with the
    // manifest listing.
    std::set<int> present;
    if (fs::is_directory(dir / "frames")) {
        for (const auto& entry : fs::directory_iterator(dir / "frames")) {
            const auto name = entry.path().filename().string();
            if (name.size() == 8 && name.ends_with(".bmt") &&
                std::all_of(name.begin(), name.begin() + 4, [](char c) { return c >= '0' && c <= '9'; }))
                present.insert(std::stoi(name.substr(0, 4)));
        }
    }
    for (int t = 0; t < m.frames; ++t) {
        if (!present.count(t)) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%04d", t);
            v.push_back(std::string("gap at ") + buf + ": missing " + frame_file_name(t));
        }
    }
    for (int t : present)
        if (t >= m.frames)
            v.push_back("frame file " + frame_file_name(t) + " beyond manifest frame count " + std::to_string(m.frames));
    if (static_cast<int>(m.frame_files.size()) != m.frames)
        v.push_back("manifest lists " + std::to_string(m.frame_files.size()) + " frame files but frames = " +
                    std::to_string(m.frames));
    for (std::size_t t = 0; t < m.frame_files.size(); ++t)
        if (m.frame_files[t] != frame_file_name(static_cast<int>(t)))
            v.push_back("manifest frame_files[" + std::to_string(t) + "] = " + m.frame_files[t] + ", expected " +
                        frame_file_name(static_cast<int>(t)));

    for (int t = 0; t < m.frames; ++t) {
        const fs::path file = dir / frame_file_name(t);
        if (!fs::exists(file))
            continue;
        try {
            // Reading the whole file also verifies the payload length.
            const auto bytes = slurp(file);
            std::size_t offset = 0;
            const TensorHeader h = decode_header(bytes, offset);
            if (h.dtype != DType::f32)
                v.push_back(frame_file_name(t) + ": dtype must be float32");
            if (h.dims.size() != 3) {
                v.push_back(frame_file_name(t) + ": expected rank 3 (C,H,W), got rank " + std::to_string(h.dims.size()));
                continue;
            }
            const std::size_t need = product(h.dims) * dtype_size(h.dtype);
            if (bytes.size() - offset != need)
                v.push_back(frame_file_name(t) + ": payload is " + std::to_string(bytes.size() - offset) +
                            " bytes, header dims " + dims_string(h.dims) + " require " + std::to_string(need));
            const int dims[3] = {static_cast<int>(h.dims[0]), static_cast<int>(h.dims[1]), static_cast<int>(h.dims[2])};
            const int want[3] = {m.channels, m.feature.height, m.feature.width};
            const char* names[3] = {"C", "H", "W"};
            for (int i = 0; i < 3; ++i)
                if (dims[i] != want[i])
                    v.push_back(std::string("dim mismatch in ") + frame_file_name(t) + ": manifest says " + names[i] +
                                "=" + std::to_string(want[i]) + ", file header says " + names[i] + "=" +
                                std::to_string(dims[i]));
        } catch (const FormatError& e) {
            v.push_back(frame_file_name(t) + ": " + e.what());
        } catch (const IoError& e) {
            v.push_back(e.what());
        }
    }

    if (static_cast<int>(m.initial_masks.size()) != m.objects)
        v.push_back("manifest lists " + std::to_string(m.initial_masks.size()) + " initial masks but objects = " +
                    std::to_string(m.objects));
    bool any_object = false;
    for (const auto& rel : m.initial_masks) {
        const fs::path file = dir / rel;
        if (!fs::exists(file)) {
            v.push_back("missing initial mask " + rel);
            continue;
        }
        try {
            const BinaryMask mask = read_mask_png(file);
            if (mask.extent != m.full)
                v.push_back("dim mismatch in " + rel + ": manifest says " + m.full.to_string() + ", image is " +
                            mask.extent.to_string());
            any_object = any_object || mask.count() > 0;
        } catch (const Error& e) {
            v.push_back(rel + ": " + e.what());
        }
    }
    if (!m.initial_masks.empty() && !any_object)
        v.push_back("no object pixels in any initial mask");
    return report;
}

SequenceBundle read_bundle(const fs::path& dir) {
    const ValidationReport report = validate_bundle(dir);
    if (!report.ok())
        throw ValidationError(report.violations);
    std::vector<std::string> ignored;
    SequenceBundle b;
    parse_manifest(dir, b.manifest, ignored);
    const auto& m = b.manifest;
    for (int t = 0; t < m.frames; ++t)
        b.frames.push_back(to_feature_map(read_tensor(dir / m.frame_files[static_cast<std::size_t>(t)])));
    b.ground_truth.resize(static_cast<std::size_t>(m.frames));
    for (const auto& rel : m.initial_masks)
        b.ground_truth[0].push_back(read_mask_png(dir / rel));
    for (int t = 1; t < m.frames; ++t) {
        std::vector<BinaryMask> masks;
        for (int k = 1; k <= m.objects; ++k) {
            const fs::path file = dir / mask_file_name(t, k);
            if (!fs::exists(file))
                break;
            masks.push_back(read_mask_png(file));
        }
        if (static_cast<int>(masks.size()) == m.objects)
            b.ground_truth[static_cast<std::size_t>(t)] = std::move(masks);
    }
    return b;
}

} // namespace bijmatch
