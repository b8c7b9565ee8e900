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

// Slow, literal reference implementations used as test oracles. None of
// these call into the library beyond reading its data types.

#pragma once

#include "bijmatch/position_embedding.hpp"
#include "bijmatch/random.hpp"
#include "bijmatch/tensors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

namespace oracle {

using bijmatch::Extent;
using bijmatch::FeatureMap;
using bijmatch::ProbMask;

inline std::vector<double> descriptor(const FeatureMap& f, int y, int x) {
    std::vector<double> v(static_cast<std::size_t>(f.channels()));
    for (int c = 0; c < f.channels(); ++c)
        v[static_cast<std::size_t>(c)] = f.at(c, y, x);
    return v;
}

inline std::vector<double> unit(std::vector<double> v) {
    double sq = 0.0;
    for (double x : v)
        sq += x * x;
    const double n = std::sqrt(sq);
    for (double& x : v)
        x = n < 1e-12 ? 0.0 : x / n;
    return v;
}

/// sim[p][q], p and q in row-major pixel order.
inline std::vector<std::vector<double>> similarity(const FeatureMap& ref, const FeatureMap& qry) {
    std::vector<std::vector<double>> out;
    for (int ry = 0; ry < ref.height(); ++ry) {
        for (int rx = 0; rx < ref.width(); ++rx) {
            const auto a = unit(descriptor(ref, ry, rx));
            std::vector<double> row;
            for (int qy = 0; qy < qry.height(); ++qy) {
                for (int qx = 0; qx < qry.width(); ++qx) {
                    const auto b = unit(descriptor(qry, qy, qx));
                    double dot = 0.0;
                    for (std::size_t c = 0; c < a.size(); ++c)
                        dot += a[c] * b[c];
                    row.push_back(std::clamp((dot + 1.0) * 0.5, 0.0, 1.0));
                }
            }
            out.push_back(std::move(row));
        }
    }
    return out;
}

/// Keep the k largest entries of each row by a full stable sort; the rest
/// become the row minimum.
inline void topk(std::vector<std::vector<double>>& s, std::optional<std::size_t> k) {
    if (!k)
        return;
    for (auto& row : s) {
        if (*k >= row.size())
            continue;
        std::vector<std::size_t> idx(row.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&row](std::size_t a, std::size_t b) { return row[a] > row[b]; });
        const double lo = *std::min_element(row.begin(), row.end());
        std::vector<double> filtered(row.size(), lo);
        for (std::size_t i = 0; i < *k; ++i)
            filtered[idx[i]] = row[idx[i]];
        row = std::move(filtered);
    }
}

struct Scores {
    std::vector<double> bg;
    std::vector<double> fg;
};

/// similarity, optional top-K, mask weighting, then the max over reference
/// pixels, each as a separate literal pass.
inline Scores match(const FeatureMap& ref, const FeatureMap& qry, const ProbMask& m, std::optional<std::size_t> k) {
    auto s = similarity(ref, qry);
    topk(s, k);
    const std::size_t nq = qry.pixels();
    std::vector<std::vector<double>> wb = s;
    std::vector<std::vector<double>> wf = s;
    for (std::size_t p = 0; p < s.size(); ++p) {
        for (std::size_t q = 0; q < nq; ++q) {
            wb[p][q] = s[p][q] * m.bg()[p];
            wf[p][q] = s[p][q] * m.fg()[p];
        }
    }
    Scores out{std::vector<double>(nq, -std::numeric_limits<double>::infinity()),
               std::vector<double>(nq, -std::numeric_limits<double>::infinity())};
    for (std::size_t q = 0; q < nq; ++q) {
        for (std::size_t p = 0; p < s.size(); ++p) {
            out.bg[q] = std::max(out.bg[q], wb[p][q]);
            out.fg[q] = std::max(out.fg[q], wf[p][q]);
        }
    }
    return out;
}

/// Zero-padded 3x3 convolution followed by ReLU, written as six nested loops.
inline std::vector<double> conv_relu(const std::vector<double>& in, Extent e, const bijmatch::ConvLayer& layer) {
    const int h = e.height;
    const int w = e.width;
    std::vector<double> out(static_cast<std::size_t>(layer.out_channels) * h * w);
    for (int o = 0; o < layer.out_channels; ++o) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = layer.bias[static_cast<std::size_t>(o)];
                for (int i = 0; i < layer.in_channels; ++i) {
                    for (int ky = 0; ky < 3; ++ky) {
                        for (int kx = 0; kx < 3; ++kx) {
                            const int yy = y + ky - 1;
                            const int xx = x + kx - 1;
                            if (yy < 0 || yy >= h || xx < 0 || xx >= w)
                                continue;
                            acc += layer.weight(o, i, ky, kx) * in[(static_cast<std::size_t>(i) * h + yy) * w + xx];
                        }
                    }
                }
                out[(static_cast<std::size_t>(o) * h + y) * w + x] = std::max(0.0, acc);
            }
        }
    }
    return out;
}

inline std::vector<double> embed(const bijmatch::MaskStack& stack, const bijmatch::ConvWeights& w) {
    std::vector<double> act = stack.planes;
    for (const auto& layer : w.layers)
        act = conv_relu(act, stack.extent, layer);
    return act;
}

/// Bilinear sample with half-pixel centers and edge clamping.
inline double bilinear_at(const std::vector<double>& plane, Extent from, Extent to, int y, int x) {
    const double sy = std::clamp((y + 0.5) * from.height / to.height - 0.5, 0.0, from.height - 1.0);
    const double sx = std::clamp((x + 0.5) * from.width / to.width - 0.5, 0.0, from.width - 1.0);
    const int y0 = static_cast<int>(std::floor(sy));
    const int x0 = static_cast<int>(std::floor(sx));
    const int y1 = std::min(y0 + 1, from.height - 1);
    const int x1 = std::min(x0 + 1, from.width - 1);
    const double fy = sy - y0;
    const double fx = sx - x0;
    auto v = [&](int yy, int xx) { return plane[static_cast<std::size_t>(yy) * from.width + xx]; };
    return (1 - fy) * ((1 - fx) * v(y0, x0) + fx * v(y0, x1)) + fy * ((1 - fx) * v(y1, x0) + fx * v(y1, x1));
}

/// Boundary F by explicit distance search instead of dilation.
inline double boundary_f(const bijmatch::BinaryMask& pred, const bijmatch::BinaryMask& gt, double tol = 0.008) {
    auto boundary = [](const bijmatch::BinaryMask& m) {
        std::vector<std::pair<int, int>> pts;
        const int h = m.extent.height;
        const int w = m.extent.width;
        auto in = [&](int y, int x) { return y >= 0 && y < h && x >= 0 && x < w && m.at(y, x); };
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (in(y, x) && (!in(y - 1, x) || !in(y + 1, x) || !in(y, x - 1) || !in(y, x + 1)))
                    pts.emplace_back(y, x);
        return pts;
    };
    const auto pb = boundary(pred);
    const auto gb = boundary(gt);
    if (pb.empty() && gb.empty())
        return 1.0;
    if (pb.empty() || gb.empty())
        return 0.0;
    const double r = std::round(tol * std::hypot(double(pred.extent.height), double(pred.extent.width)));
    auto hits = [r](const std::vector<std::pair<int, int>>& from, const std::vector<std::pair<int, int>>& to) {
        std::size_t n = 0;
        for (const auto& a : from) {
            for (const auto& b : to) {
                const double dy = a.first - b.first;
                const double dx = a.second - b.second;
                if (dy * dy + dx * dx <= r * r) {
                    ++n;
                    break;
                }
            }
        }
        return static_cast<double>(n);
    };
    const double precision = hits(pb, gb) / static_cast<double>(pb.size());
    const double recall = hits(gb, pb) / static_cast<double>(gb.size());
    return precision + recall == 0.0 ? 0.0 : 2 * precision * recall / (precision + recall);
}

/// Random feature map with values in [-1, 1]; `zero_share` of the pixels are
/// zero vectors.
inline FeatureMap random_features(bijmatch::Rng& rng, int channels, Extent e, double zero_share = 0.0) {
    FeatureMap f(channels, e);
    for (int y = 0; y < e.height; ++y) {
        for (int x = 0; x < e.width; ++x) {
            const bool zero = rng.uniform() < zero_share;
            for (int c = 0; c < channels; ++c)
                f.at(c, y, x) = zero ? 0.0f : static_cast<float>(rng.uniform(-1.0, 1.0));
        }
    }
    return f;
}

/// Soft random mask with some exact 0 and 1 entries.
inline ProbMask random_mask(bijmatch::Rng& rng, Extent e) {
    std::vector<double> fg(e.area());
    for (double& v : fg) {
        const double u = rng.uniform();
        v = u < 0.2 ? 0.0 : u > 0.8 ? 1.0 : rng.uniform();
    }
    return ProbMask::from_foreground(e, std::move(fg));
}

} // namespace oracle
