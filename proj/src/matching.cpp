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

#include "bijmatch/matching.hpp"

#include "bijmatch/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

namespace bijmatch {

namespace {

constexpr double kNormEpsilon = 1e-12;

// Channel-major (C x N) copy of the unit-normalized descriptors. The per-pixel
// arithmetic is the same sequence of operations as normalize_channels, but kept
// in double precision.
std::vector<double> unit_descriptors(const FeatureMap& f) {
    const std::size_t n = f.pixels();
    const int channels = f.channels();
    const auto src = f.data();
    std::vector<double> out(src.size(), 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        double sq = 0.0;
        for (int c = 0; c < channels; ++c) {
            const double v = src[static_cast<std::size_t>(c) * n + p];
            if (!std::isfinite(v))
                throw InvalidInput("similarity_matrix: non-finite feature at pixel " + std::to_string(p));
            sq += v * v;
        }
        const double norm = std::sqrt(sq);
        if (norm < kNormEpsilon)
            continue;
        for (int c = 0; c < channels; ++c) {
            const std::size_t i = static_cast<std::size_t>(c) * n + p;
            out[i] = src[i] / norm;
        }
    }
    return out;
}

// Row indices kept by the top-K rule, marked in `keep`.
void select_topk(std::span<const double> row, std::size_t k, std::vector<std::size_t>& order,
                 std::vector<char>& keep) {
    const std::size_t n = row.size();
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto before = [&row](std::size_t a, std::size_t b) {
        return row[a] > row[b] || (row[a] == row[b] && a < b);
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), before);
    keep.assign(n, 0);
    for (std::size_t i = 0; i < k; ++i)
        keep[order[i]] = 1;
}

void require_same_shape(const SimMatrix& a, const SimMatrix& b, const char* what) {
    if (a.ref != b.ref || a.query != b.query)
        throw InvalidArgument(std::string(what) + ": shape mismatch");
}

} // namespace

TopK TopK::finite(long long k) {
    if (k < 1)
        throw InvalidArgument("K must be >= 1, got " + std::to_string(k));
    return TopK(static_cast<std::size_t>(k));
}

TopK TopK::parse(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "inf" || lower == "infinity")
        return infinite();
    long long k = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, k);
    if (ec != std::errc() || ptr != end)
        throw InvalidArgument("K must be a positive integer or 'inf', got '" + std::string(text) + "'");
    return finite(k);
}

std::string TopK::to_string() const {
    return is_infinite() ? "inf" : std::to_string(k_);
}

SimMatrix similarity_matrix(const FeatureMap& ref, const FeatureMap& qry) {
    if (ref.channels() != qry.channels())
        throw InvalidArgument("similarity_matrix: channel mismatch (" + std::to_string(ref.channels()) + " vs " +
                              std::to_string(qry.channels()) + ")");
    const std::size_t channels = static_cast<std::size_t>(ref.channels());
    const std::size_t nr = ref.pixels();
    const std::size_t nq = qry.pixels();
    const auto a = unit_descriptors(ref);
    const auto b = unit_descriptors(qry);

    SimMatrix s(ref.extent(), qry.extent());
    // Each dot product accumulates over channels in index order; the query
    // axis is the vectorized one. Four reference rows share every query load.
    constexpr std::size_t kBlock = 4;
    std::size_t p = 0;
    for (; p + kBlock <= nr; p += kBlock) {
        double* r0 = s.data.data() + (p + 0) * nq;
        double* r1 = s.data.data() + (p + 1) * nq;
        double* r2 = s.data.data() + (p + 2) * nq;
        double* r3 = s.data.data() + (p + 3) * nq;
        for (std::size_t c = 0; c < channels; ++c) {
            const double* bq = b.data() + c * nq;
            const double a0 = a[c * nr + p + 0];
            const double a1 = a[c * nr + p + 1];
            const double a2 = a[c * nr + p + 2];
            const double a3 = a[c * nr + p + 3];
            for (std::size_t q = 0; q < nq; ++q) {
                const double v = bq[q];
                r0[q] += a0 * v;
                r1[q] += a1 * v;
                r2[q] += a2 * v;
                r3[q] += a3 * v;
            }
        }
    }
    for (; p < nr; ++p) {
        double* r = s.data.data() + p * nq;
        for (std::size_t c = 0; c < channels; ++c) {
            const double* bq = b.data() + c * nq;
            const double ap = a[c * nr + p];
            for (std::size_t q = 0; q < nq; ++q)
                r[q] += ap * bq[q];
        }
    }
    for (double& v : s.data)
        v = std::clamp((v + 1.0) * 0.5, 0.0, 1.0);
    return s;
}

void topk_filter_inplace(SimMatrix& s, TopK k) {
    if (k.covers(s.cols()))
        return;
    std::vector<std::size_t> order;
    std::vector<char> keep;
    for (std::size_t p = 0; p < s.rows(); ++p) {
        auto row = s.row(p);
        const double row_min = *std::min_element(row.begin(), row.end());
        select_topk(row, k.value(), order, keep);
        for (std::size_t q = 0; q < row.size(); ++q)
            if (!keep[q])
                row[q] = row_min;
    }
}

SimMatrix topk_filter(const SimMatrix& s, TopK k) {
    SimMatrix out = s;
    topk_filter_inplace(out, k);
    return out;
}

std::pair<SimMatrix, SimMatrix> mask_weighted_scores(const SimMatrix& s, const ProbMask& m_ref) {
    if (m_ref.extent() != s.ref)
        throw InvalidArgument("mask_weighted_scores: mask is " + m_ref.extent().to_string() +
                              " but the reference grid is " + s.ref.to_string());
    SimMatrix s_bg(s.ref, s.query);
    SimMatrix s_fg(s.ref, s.query);
    const auto bg = m_ref.bg();
    const auto fg = m_ref.fg();
    for (std::size_t p = 0; p < s.rows(); ++p) {
        const auto src = s.row(p);
        auto dbg = s_bg.row(p);
        auto dfg = s_fg.row(p);
        for (std::size_t q = 0; q < src.size(); ++q) {
            dbg[q] = src[q] * bg[p];
            dfg[q] = src[q] * fg[p];
        }
    }
    return {std::move(s_bg), std::move(s_fg)};
}

ScoreMapPair reduce_query_max(const SimMatrix& s_bg, const SimMatrix& s_fg) {
    require_same_shape(s_bg, s_fg, "reduce_query_max");
    ScoreMapPair out{s_bg.query, std::vector<double>(s_bg.cols(), 0.0), std::vector<double>(s_bg.cols(), 0.0)};
    for (std::size_t p = 0; p < s_bg.rows(); ++p) {
        const auto rb = s_bg.row(p);
        const auto rf = s_fg.row(p);
        for (std::size_t q = 0; q < rb.size(); ++q) {
            out.bg[q] = std::max(out.bg[q], rb[q]);
            out.fg[q] = std::max(out.fg[q], rf[q]);
        }
    }
    return out;
}

ScoreMapPair match(const FeatureMap& ref, const FeatureMap& qry, const ProbMask& m_ref, MatchMode mode) {
    if (m_ref.extent() != ref.extent())
        throw InvalidArgument("match: mask is " + m_ref.extent().to_string() + " but the reference grid is " +
                              ref.extent().to_string());
    SimMatrix s = similarity_matrix(ref, qry);
    if (mode.kind == MatchMode::Kind::bijective)
        topk_filter_inplace(s, mode.k);

    ScoreMapPair out{qry.extent(), std::vector<double>(s.cols(), 0.0), std::vector<double>(s.cols(), 0.0)};
    const auto bg = m_ref.bg();
    const auto fg = m_ref.fg();
    for (std::size_t p = 0; p < s.rows(); ++p) {
        const auto row = s.row(p);
        const double wb = bg[p];
        const double wf = fg[p];
        for (std::size_t q = 0; q < row.size(); ++q) {
            out.bg[q] = std::max(out.bg[q], row[q] * wb);
            out.fg[q] = std::max(out.fg[q], row[q] * wf);
        }
    }
    return out;
}

} // namespace bijmatch
