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

#include "bijmatch/pipeline.hpp"

#include "bijmatch/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace bijmatch {

namespace {

// [1 4 6 4 1] along each axis; weights outside the grid are dropped and the
// remainder renormalized.
std::vector<double> binomial_blur(std::span<const double> plane, Extent e) {
    constexpr std::array<double, 5> k{1.0, 4.0, 6.0, 4.0, 1.0};
    auto pass = [&k](std::span<const double> src, int h, int w, bool horizontal) {
        std::vector<double> dst(src.size());
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                double norm = 0.0;
                for (int t = -2; t <= 2; ++t) {
                    const int yy = horizontal ? y : y + t;
                    const int xx = horizontal ? x + t : x;
                    if (yy < 0 || yy >= h || xx < 0 || xx >= w)
                        continue;
                    const double wt = k[static_cast<std::size_t>(t + 2)];
                    acc += wt * src[static_cast<std::size_t>(yy) * w + xx];
                    norm += wt;
                }
                dst[static_cast<std::size_t>(y) * w + x] = acc / norm;
            }
        }
        return dst;
    };
    const auto tmp = pass(plane, e.height, e.width, true);
    return pass(tmp, e.height, e.width, false);
}

MatchMode mode_for(TopK k) {
    return k.is_infinite() ? MatchMode::surjective() : MatchMode::bijective(k);
}

} // namespace

void PipelineConfig::validate() const {
    if (history_l < 1)
        throw InvalidArgument("history length must be >= 1, got " + std::to_string(history_l));
    if (!(fusion_alpha >= 0.0 && fusion_alpha <= 1.0))
        throw InvalidArgument("fusion_alpha must lie in [0,1]");
    if (!(fusion_beta >= 0.0 && fusion_beta <= 1.0))
        throw InvalidArgument("fusion_beta must lie in [0,1]");
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw InvalidArgument("epsilon must lie in (0, 0.5)");
    if (fg_pixel_threshold < 0)
        throw InvalidArgument("fg_pixel_threshold must be >= 0");
}

ConvWeights resolve_weights(const PipelineConfig& cfg) {
    if (const auto* path = std::get_if<std::filesystem::path>(&cfg.weights_source))
        return load_weights(*path, cfg.history_l);
    EmbeddingShape shape;
    shape.history_length = cfg.history_l;
    return init_weights(std::get<std::uint64_t>(cfg.weights_source), shape);
}

VideoState VideoState::initialize(const FeatureMap& frame0, const std::vector<BinaryMask>& masks) {
    if (masks.empty())
        throw ValidationError("no object mask for frame 0");
    VideoState s;
    s.initial_features = frame0;
    s.previous_features = frame0;
    s.full = masks.front().extent;
    for (const BinaryMask& m : masks) {
        if (m.extent != s.full)
            throw InvalidArgument("initial masks differ in size");
        ProbMask pooled = downsample_mask(ProbMask::from_binary(m.extent, m.bits), frame0.height(), frame0.width());
        s.initial_masks.push_back(pooled);
        s.mask_history.push_back({std::move(pooled)});
    }
    return s;
}

ProbMask fusion_decode(const ScoreMapPair& global_scores, const ScoreMapPair& local_scores, const ProbMask& prev_mask,
                       const PipelineConfig& cfg) {
    const Extent e = global_scores.extent;
    if (local_scores.extent != e || prev_mask.extent() != e)
        throw InvalidArgument("fusion_decode: resolution mismatch (global " + e.to_string() + ", local " +
                              local_scores.extent.to_string() + ", previous mask " + prev_mask.extent().to_string() + ")");
    const double a = cfg.fusion_alpha;
    const double b = cfg.fusion_beta;
    const auto prior_bg = binomial_blur(prev_mask.bg(), e);
    const auto prior_fg = binomial_blur(prev_mask.fg(), e);
    std::vector<double> bg(e.area());
    std::vector<double> fg(e.area());
    for (std::size_t i = 0; i < e.area(); ++i) {
        const double sb = a * global_scores.bg[i] + (1.0 - a) * local_scores.bg[i] + b * prior_bg[i];
        const double sf = a * global_scores.fg[i] + (1.0 - a) * local_scores.fg[i] + b * prior_fg[i];
        const double total = sb + sf;
        if (total < cfg.epsilon) {
            bg[i] = 0.5;
            fg[i] = 0.5;
        } else {
            fg[i] = sf / total;
            bg[i] = 1.0 - fg[i];
        }
    }
    return ProbMask(e, std::move(bg), std::move(fg));
}

AggregatedMasks soft_aggregate(std::span<const std::vector<double>> fg_probs, Extent extent, double epsilon) {
    if (fg_probs.empty())
        throw InvalidArgument("soft_aggregate: no objects");
    if (fg_probs.size() > 255)
        throw InvalidArgument("soft_aggregate: at most 255 objects");
    for (const auto& p : fg_probs)
        if (p.size() != extent.area())
            throw InvalidArgument("soft_aggregate: map size does not match " + extent.to_string());
    const std::size_t n = extent.area();
    const std::size_t m = fg_probs.size();
    AggregatedMasks out;
    out.objects.assign(m, std::vector<double>(n));
    out.background.resize(n);
    out.labels = LabelMask(extent);
    auto odds = [epsilon](double p) {
        p = std::clamp(p, epsilon, 1.0 - epsilon);
        return p / (1.0 - p);
    };
    std::vector<double> o(m + 1);
    for (std::size_t i = 0; i < n; ++i) {
        double bg = 1.0;
        for (std::size_t k = 0; k < m; ++k)
            bg *= 1.0 - std::clamp(fg_probs[k][i], 0.0, 1.0);
        o[0] = odds(bg);
        double total = o[0];
        for (std::size_t k = 0; k < m; ++k) {
            o[k + 1] = odds(fg_probs[k][i]);
            total += o[k + 1];
        }
        out.background[i] = o[0] / total;
        std::size_t best = 0;
        for (std::size_t k = 0; k < m; ++k) {
            out.objects[k][i] = o[k + 1] / total;
            if (o[k + 1] > o[best])
                best = k + 1;
        }
        out.labels.labels[i] = static_cast<std::uint8_t>(best);
    }
    return out;
}

StepResult step(const VideoState& state, const FeatureMap& query_features, const PipelineConfig& cfg,
                const ConvWeights& weights) {
    if (!state.initialized())
        throw StateError("step: video state is not initialized");
    if (query_features.channels() != state.initial_features.channels())
        throw InvalidArgument("step: query has " + std::to_string(query_features.channels()) +
                              " channels, reference frames have " + std::to_string(state.initial_features.channels()));
    if (query_features.extent() != state.previous_features.extent())
        throw InvalidArgument("step: query grid " + query_features.extent().to_string() +
                              " differs from the reference grid " + state.previous_features.extent().to_string());
    const Extent grid = query_features.extent();
    const std::size_t objects = state.objects();

    FramePrediction pred;
    pred.diagnostics.reserve(objects);
    std::vector<std::vector<double>> decoded_fg;
    decoded_fg.reserve(objects);
    for (std::size_t k = 0; k < objects; ++k) {
        const auto& history = state.mask_history[k];
        const ProbMask& prev = history.back();
        ObjectDiagnostics d;
        d.global = match(state.initial_features, query_features, state.initial_masks[k], mode_for(cfg.k_global));
        d.local = match(state.previous_features, query_features, prev, MatchMode::bijective(cfg.k_local));
        d.position = embed_position_features(stack_history(history, cfg.history_l, grid.height, grid.width), weights);
        d.decoded = fusion_decode(d.global, d.local, prev, cfg);
        decoded_fg.emplace_back(d.decoded.fg().begin(), d.decoded.fg().end());
        pred.diagnostics.push_back(std::move(d));
    }

    const AggregatedMasks agg = soft_aggregate(decoded_fg, grid, cfg.epsilon);
    pred.grid_labels = agg.labels;

    // Full resolution: bilinear resampling is a convex combination, so the
    // per-pixel distribution still sums to one.
    const Extent full = state.full;
    const auto bg_full = resize_bilinear(agg.background, grid, full);
    std::vector<std::vector<double>> obj_full;
    obj_full.reserve(objects);
    for (std::size_t k = 0; k < objects; ++k) {
        obj_full.push_back(resize_bilinear(agg.objects[k], grid, full));
        pred.objects.push_back(ProbMask::from_foreground(full, obj_full.back()));
    }
    pred.labels = LabelMask(full);
    for (std::size_t i = 0; i < full.area(); ++i) {
        double best = bg_full[i];
        std::uint8_t label = 0;
        for (std::size_t k = 0; k < objects; ++k) {
            if (obj_full[k][i] > best) {
                best = obj_full[k][i];
                label = static_cast<std::uint8_t>(k + 1);
            }
        }
        pred.labels.labels[i] = label;
    }

    StepResult result{std::move(pred), state};
    VideoState& next = result.next;
    next.previous_features = query_features;
    next.frame_index = state.frame_index + 1;
    for (std::size_t k = 0; k < objects; ++k) {
        auto& history = next.mask_history[k];
        history.push_back(ProbMask::from_foreground(grid, agg.objects[k]));
        if (history.size() > static_cast<std::size_t>(cfg.history_l))
            history.erase(history.begin(), history.end() - cfg.history_l);
    }
    return result;
}

std::vector<FramePrediction> run_sequence(const SequenceBundle& bundle, const PipelineConfig& cfg) {
    cfg.validate();
    return run_sequence(bundle, cfg, resolve_weights(cfg));
}

std::vector<FramePrediction> run_sequence(const SequenceBundle& bundle, const PipelineConfig& cfg,
                                          const ConvWeights& weights) {
    cfg.validate();
    if (bundle.frames.empty())
        throw ValidationError("bundle has no frames");
    if (bundle.ground_truth.empty() || bundle.ground_truth.front().empty())
        throw ValidationError("bundle has no object mask on frame 0");
    const auto& initial = bundle.initial_masks();
    if (std::none_of(initial.begin(), initial.end(), [](const BinaryMask& m) { return m.count() > 0; }))
        throw ValidationError("no object pixels in frame 0");

    std::vector<FramePrediction> out;
    out.reserve(bundle.frames.size());
    FramePrediction first;
    for (const BinaryMask& m : initial)
        first.objects.push_back(ProbMask::from_binary(m.extent, m.bits));
    first.labels = bundle.ground_truth_labels(0);
    out.push_back(std::move(first));

    VideoState state = VideoState::initialize(bundle.frames.front(), initial);
    for (std::size_t t = 1; t < bundle.frames.size(); ++t) {
        StepResult r = step(state, bundle.frames[t], cfg, weights);
        out.push_back(std::move(r.prediction));
        state = std::move(r.next);
    }
    return out;
}

WorkingResolution select_working_resolution(long long initial_fg_pixel_count, const PipelineConfig& cfg) {
    if (initial_fg_pixel_count < 0)
        throw InvalidArgument("foreground pixel count must be >= 0");
    return initial_fg_pixel_count < cfg.fg_pixel_threshold ? WorkingResolution::native
                                                           : WorkingResolution::shorter_side_480;
}

Extent working_extent(WorkingResolution r, Extent original) {
    if (r == WorkingResolution::native)
        return original;
    const int shorter = std::min(original.height, original.width);
    const double scale = 480.0 / shorter;
    return {static_cast<int>(std::lround(original.height * scale)), static_cast<int>(std::lround(original.width * scale))};
}

} // namespace bijmatch
