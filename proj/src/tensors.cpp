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

#include "bijmatch/tensors.hpp"

#include "bijmatch/error.hpp"

#include <algorithm>
#include <cmath>

namespace bijmatch {

namespace {

constexpr double kNormEpsilon = 1e-12;

void require_extent(Extent e, const char* what) {
    if (!e.valid())
        throw InvalidArgument(std::string(what) + ": dimensions must be positive, got " + e.to_string());
}

// One target cell's footprint along one axis: (source index, overlap length).
struct Tap {
    int index;
    double weight;
};

std::vector<std::vector<Tap>> area_taps(int src, int dst) {
    std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(dst));
    const double scale = static_cast<double>(src) / dst;
    for (int d = 0; d < dst; ++d) {
        const double lo = d * scale;
        const double hi = (d + 1) * scale;
        for (int s = static_cast<int>(std::floor(lo)); s < src && s < hi; ++s) {
            const double w = std::min<double>(s + 1, hi) - std::max<double>(s, lo);
            if (w > 0.0)
                taps[static_cast<std::size_t>(d)].push_back({s, w});
        }
    }
    return taps;
}

std::vector<double> area_pool(std::span<const double> plane, Extent from, Extent to) {
    const auto ty = area_taps(from.height, to.height);
    const auto tx = area_taps(from.width, to.width);
    // Horizontal pass first, then vertical.
    std::vector<double> rows(static_cast<std::size_t>(from.height) * to.width, 0.0);
    for (int y = 0; y < from.height; ++y) {
        const double* src = plane.data() + static_cast<std::size_t>(y) * from.width;
        for (int x = 0; x < to.width; ++x) {
            double acc = 0.0;
            double norm = 0.0;
            for (const Tap& t : tx[static_cast<std::size_t>(x)]) {
                acc += t.weight * src[t.index];
                norm += t.weight;
            }
            rows[static_cast<std::size_t>(y) * to.width + x] = acc / norm;
        }
    }
    std::vector<double> out(to.area(), 0.0);
    for (int y = 0; y < to.height; ++y) {
        for (int x = 0; x < to.width; ++x) {
            double acc = 0.0;
            double norm = 0.0;
            for (const Tap& t : ty[static_cast<std::size_t>(y)]) {
                acc += t.weight * rows[static_cast<std::size_t>(t.index) * to.width + x];
                norm += t.weight;
            }
            out[static_cast<std::size_t>(y) * to.width + x] = acc / norm;
        }
    }
    return out;
}

struct LinearTap {
    int lo;
    int hi;
    double t;
};

std::vector<LinearTap> linear_taps(int src, int dst) {
    std::vector<LinearTap> taps(static_cast<std::size_t>(dst));
    const double scale = static_cast<double>(src) / dst;
    for (int d = 0; d < dst; ++d) {
        double s = (d + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const int lo = static_cast<int>(std::floor(s));
        const int hi = std::min(lo + 1, src - 1);
        taps[static_cast<std::size_t>(d)] = {lo, hi, s - lo};
    }
    return taps;
}

} // namespace

std::string Extent::to_string() const {
    return std::to_string(height) + "x" + std::to_string(width);
}

FeatureMap::FeatureMap(int channels, Extent extent)
    : channels_(channels), extent_(extent) {
    if (channels <= 0)
        throw InvalidArgument("FeatureMap: channel count must be positive");
    require_extent(extent, "FeatureMap");
    data_.assign(static_cast<std::size_t>(channels) * extent.area(), 0.0f);
}

FeatureMap::FeatureMap(int channels, Extent extent, std::vector<float> data)
    : FeatureMap(channels, extent) {
    if (data.size() != data_.size())
        throw InvalidArgument("FeatureMap: data length " + std::to_string(data.size()) + " != C*H*W = " +
                              std::to_string(data_.size()));
    for (float v : data)
        if (!std::isfinite(v))
            throw InvalidInput("FeatureMap: non-finite value");
    data_ = std::move(data);
}

ProbMask::ProbMask(Extent extent, std::vector<double> bg, std::vector<double> fg)
    : extent_(extent), bg_(std::move(bg)), fg_(std::move(fg)) {
    require_extent(extent, "ProbMask");
    if (bg_.size() != extent.area() || fg_.size() != extent.area())
        throw InvalidArgument("ProbMask: plane length does not match " + extent.to_string());
    for (std::size_t i = 0; i < fg_.size(); ++i) {
        const double b = bg_[i];
        const double f = fg_[i];
        if (!(b >= -kSumTolerance && b <= 1.0 + kSumTolerance && f >= -kSumTolerance && f <= 1.0 + kSumTolerance))
            throw InvalidInput("ProbMask: probability outside [0,1] at pixel " + std::to_string(i));
        if (std::abs(b + f - 1.0) > kSumTolerance)
            throw InvalidInput("ProbMask: bg + fg != 1 at pixel " + std::to_string(i));
    }
}

ProbMask ProbMask::from_foreground(Extent extent, std::vector<double> fg) {
    std::vector<double> bg(fg.size());
    for (std::size_t i = 0; i < fg.size(); ++i)
        bg[i] = 1.0 - fg[i];
    return ProbMask(extent, std::move(bg), std::move(fg));
}

ProbMask ProbMask::from_binary(Extent extent, std::span<const std::uint8_t> bits) {
    std::vector<double> fg(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        fg[i] = bits[i] ? 1.0 : 0.0;
    return from_foreground(extent, std::move(fg));
}

BinaryMask::BinaryMask(Extent e, std::vector<std::uint8_t> b) : extent(e), bits(std::move(b)) {
    if (bits.size() != extent.area())
        throw InvalidArgument("BinaryMask: data length does not match " + extent.to_string());
    for (auto& v : bits)
        v = v ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

LabelMask::LabelMask(Extent e, std::vector<std::uint8_t> l) : extent(e), labels(std::move(l)) {
    if (labels.size() != extent.area())
        throw InvalidArgument("LabelMask: data length does not match " + extent.to_string());
}

int LabelMask::max_label() const noexcept {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

BinaryMask LabelMask::object(int k) const {
    BinaryMask out(extent);
    for (std::size_t i = 0; i < labels.size(); ++i)
        out.bits[i] = labels[i] == k ? 1 : 0;
    return out;
}

FeatureMap normalize_channels(const FeatureMap& f) {
    FeatureMap out(f.channels(), f.extent());
    const std::size_t n = f.pixels();
    const auto src = f.data();
    auto dst = out.data();
    for (std::size_t p = 0; p < n; ++p) {
        double sq = 0.0;
        for (int c = 0; c < f.channels(); ++c) {
            const double v = src[static_cast<std::size_t>(c) * n + p];
            if (!std::isfinite(v))
                throw InvalidInput("normalize_channels: non-finite value at pixel " + std::to_string(p));
            sq += v * v;
        }
        const double norm = std::sqrt(sq);
        if (norm < kNormEpsilon)
            continue;
        for (int c = 0; c < f.channels(); ++c) {
            const std::size_t i = static_cast<std::size_t>(c) * n + p;
            dst[i] = static_cast<float>(src[i] / norm);
        }
    }
    return out;
}

ProbMask downsample_mask(const ProbMask& m, int target_h, int target_w) {
    const Extent to{target_h, target_w};
    require_extent(to, "downsample_mask");
    if (target_h > m.height() || target_w > m.width())
        throw InvalidArgument("downsample_mask: target " + to.to_string() + " exceeds source " +
                              m.extent().to_string());
    if (to == m.extent())
        return m;
    auto bg = area_pool(m.bg(), m.extent(), to);
    auto fg = area_pool(m.fg(), m.extent(), to);
    return ProbMask(to, std::move(bg), std::move(fg));
}

std::vector<double> resize_bilinear(std::span<const double> plane, Extent from, Extent to) {
    const auto ty = linear_taps(from.height, to.height);
    const auto tx = linear_taps(from.width, to.width);
    std::vector<double> out(to.area());
    for (int y = 0; y < to.height; ++y) {
        const LinearTap& a = ty[static_cast<std::size_t>(y)];
        const double* r0 = plane.data() + static_cast<std::size_t>(a.lo) * from.width;
        const double* r1 = plane.data() + static_cast<std::size_t>(a.hi) * from.width;
        for (int x = 0; x < to.width; ++x) {
            const LinearTap& b = tx[static_cast<std::size_t>(x)];
            const double top = r0[b.lo] + (r0[b.hi] - r0[b.lo]) * b.t;
            const double bot = r1[b.lo] + (r1[b.hi] - r1[b.lo]) * b.t;
            out[static_cast<std::size_t>(y) * to.width + x] = top + (bot - top) * a.t;
        }
    }
    return out;
}

ProbMask upsample_probmask(const ProbMask& m, int target_h, int target_w) {
    const Extent to{target_h, target_w};
    require_extent(to, "upsample_probmask");
    if (target_h < m.height() || target_w < m.width())
        throw InvalidArgument("upsample_probmask: target " + to.to_string() + " is smaller than source " +
                              m.extent().to_string());
    if (to == m.extent())
        return m;
    auto bg = resize_bilinear(m.bg(), m.extent(), to);
    auto fg = resize_bilinear(m.fg(), m.extent(), to);
    for (std::size_t i = 0; i < fg.size(); ++i) {
        const double b = std::clamp(bg[i], 0.0, 1.0);
        const double f = std::clamp(fg[i], 0.0, 1.0);
        const double s = b + f;
        bg[i] = s > 0.0 ? b / s : 0.5;
        fg[i] = s > 0.0 ? f / s : 0.5;
    }
    return ProbMask(to, std::move(bg), std::move(fg));
}

CoordChannels coordinate_grid(int h, int w) {
    require_extent({h, w}, "coordinate_grid");
    CoordChannels g;
    g.extent = {h, w};
    g.y_norm.resize(g.extent.area());
    g.x_norm.resize(g.extent.area());
    g.center_dist.resize(g.extent.area());
    auto axis = [](int i, int n) { return n == 1 ? 0.0 : 2.0 * i / (n - 1) - 1.0; };
    const double sqrt2 = std::sqrt(2.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            const double yn = axis(r, h);
            const double xn = axis(c, w);
            g.y_norm[i] = yn;
            g.x_norm[i] = xn;
            g.center_dist[i] = std::sqrt(yn * yn + xn * xn) / sqrt2;
        }
    }
    return g;
}

} // namespace bijmatch
