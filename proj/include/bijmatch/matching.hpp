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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bijmatch {

/// Reference-by-query similarity scores in [0,1]. Row p is reference pixel p,
/// column q is query pixel q; rows are contiguous.
struct SimMatrix {
    Extent ref;
    Extent query;
    std::vector<double> data;

    SimMatrix() = default;
    SimMatrix(Extent r, Extent q) : ref(r), query(q), data(r.area() * q.area(), 0.0) {}

    std::size_t rows() const noexcept { return ref.area(); }
    std::size_t cols() const noexcept { return query.area(); }
    std::span<double> row(std::size_t p) noexcept { return {data.data() + p * cols(), cols()}; }
    std::span<const double> row(std::size_t p) const noexcept { return {data.data() + p * cols(), cols()}; }
    double at(std::size_t p, std::size_t q) const noexcept { return data[p * cols() + q]; }

    friend bool operator==(const SimMatrix&, const SimMatrix&) = default;
};

/// Background and foreground matching scores on the query grid. The two maps
/// are independent max-reductions and need not sum to one.
struct ScoreMapPair {
    Extent extent;
    std::vector<double> bg;
    std::vector<double> fg;

    friend bool operator==(const ScoreMapPair&, const ScoreMapPair&) = default;
};

/// Number of connections each reference pixel keeps; infinite keeps all.
class TopK {
public:
    static constexpr TopK infinite() noexcept { return TopK(0); }
    /// Throws InvalidArgument for k < 1.
    static TopK finite(long long k);
    /// Accepts "inf" (any case) or a positive integer.
    static TopK parse(std::string_view text);

    bool is_infinite() const noexcept { return k_ == 0; }
    std::size_t value() const noexcept { return k_; }
    /// True when this K keeps every entry of a row of length n.
    bool covers(std::size_t n) const noexcept { return is_infinite() || k_ >= n; }
    std::string to_string() const;

    friend bool operator==(TopK, TopK) = default;

private:
    constexpr explicit TopK(std::size_t k) noexcept : k_(k) {}
    std::size_t k_;
};

struct MatchMode {
    enum class Kind { surjective, bijective };
    Kind kind = Kind::surjective;
    TopK k = TopK::infinite();

    static MatchMode surjective() noexcept { return {}; }
    static MatchMode bijective(TopK k) noexcept { return {Kind::bijective, k}; }
};

/// (N(ref_p) . N(qry_q) + 1) / 2 for every pixel pair.
SimMatrix similarity_matrix(const FeatureMap& ref, const FeatureMap& qry);

/// Keeps the k largest entries of every row (ties go to the lower query
/// index) and overwrites the rest with the row's original minimum.
SimMatrix topk_filter(const SimMatrix& s, TopK k);
void topk_filter_inplace(SimMatrix& s, TopK k);

/// (S scaled row-wise by m_ref.bg, S scaled row-wise by m_ref.fg).
std::pair<SimMatrix, SimMatrix> mask_weighted_scores(const SimMatrix& s, const ProbMask& m_ref);

/// Column maxima of both matrices, reshaped to the query grid.
ScoreMapPair reduce_query_max(const SimMatrix& s_bg, const SimMatrix& s_fg);

/// similarity -> top-K (bijective only) -> mask weighting -> query-wise max.
/// The weighting and reduction are fused; the result is identical to
/// composing the individual operations.
ScoreMapPair match(const FeatureMap& ref, const FeatureMap& qry, const ProbMask& m_ref, MatchMode mode);

} // namespace bijmatch
