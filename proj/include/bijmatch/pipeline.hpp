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

#include "bijmatch/interchange.hpp"
#include "bijmatch/matching.hpp"
#include "bijmatch/position_embedding.hpp"
#include "bijmatch/tensors.hpp"

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

namespace bijmatch {

/// Either a seed for init_weights or a weights file.
using WeightsSource = std::variant<std::uint64_t, std::filesystem::path>;

struct PipelineConfig {
    TopK k_global = TopK::infinite();
    TopK k_local = TopK::finite(4);
    int history_l = 3;
    double fusion_alpha = 0.5;
    double fusion_beta = 0.25;
    double epsilon = 1e-7;
    int fg_pixel_threshold = 1000;
    WeightsSource weights_source = std::uint64_t{0};

    /// Throws InvalidArgument on out-of-range fields.
    void validate() const;
};

/// Loads or generates the embedding weights named by cfg.weights_source.
ConvWeights resolve_weights(const PipelineConfig& cfg);

/// Intermediate results for one object in one frame, at feature resolution.
struct ObjectDiagnostics {
    ScoreMapPair global;
    ScoreMapPair local;
    PositionFeatures position;
    ProbMask decoded;
};

struct FramePrediction {
    std::vector<ProbMask> objects; // full resolution, post-aggregation
    LabelMask labels;              // full resolution
    LabelMask grid_labels;         // feature resolution, from soft aggregation; empty for frame 0
    std::vector<ObjectDiagnostics> diagnostics; // empty for frame 0
};

/// Everything carried from one frame to the next. Masks are held at feature
/// resolution; history is oldest-first and at most history_l long.
struct VideoState {
    FeatureMap initial_features;
    std::vector<ProbMask> initial_masks;
    FeatureMap previous_features;
    std::vector<std::vector<ProbMask>> mask_history;
    Extent full;
    int frame_index = 0;

    bool initialized() const noexcept { return !initial_masks.empty(); }
    std::size_t objects() const noexcept { return initial_masks.size(); }

    /// State after frame 0 from its features and full-resolution object masks.
    static VideoState initialize(const FeatureMap& frame0, const std::vector<BinaryMask>& masks);
};

struct AggregatedMasks {
    std::vector<std::vector<double>> objects;
    std::vector<double> background;
    LabelMask labels;
};

/// score_c = alpha * global_c + (1 - alpha) * local_c + beta * blur(prev_c),
/// normalized per pixel. blur is a 5x5 binomial filter renormalized at the
/// borders; when both scores are below epsilon the pixel is split 0.5/0.5.
ProbMask fusion_decode(const ScoreMapPair& global_scores, const ScoreMapPair& local_scores, const ProbMask& prev_mask,
                       const PipelineConfig& cfg);

/// Odds-based merge of per-object foreground probabilities with the implied
/// background prod(1 - p_m). Probabilities are clamped to [eps, 1 - eps]
/// before taking odds. Labels take the argmax, ties to the lowest index.
AggregatedMasks soft_aggregate(std::span<const std::vector<double>> fg_probs, Extent extent, double epsilon);

struct StepResult {
    FramePrediction prediction;
    VideoState next;
};

/// Segments one query frame against frame 0 (global) and the previous frame
/// (local), then aggregates all objects.
StepResult step(const VideoState& state, const FeatureMap& query_features, const PipelineConfig& cfg,
                const ConvWeights& weights);

/// Frame 0 is the given ground truth; frames 1..T-1 come from step().
std::vector<FramePrediction> run_sequence(const SequenceBundle& bundle, const PipelineConfig& cfg);
std::vector<FramePrediction> run_sequence(const SequenceBundle& bundle, const PipelineConfig& cfg,
                                          const ConvWeights& weights);

enum class WorkingResolution { native, shorter_side_480 };

/// Native resolution for small objects (count below the threshold),
/// otherwise the shorter image side goes to 480.
WorkingResolution select_working_resolution(long long initial_fg_pixel_count, const PipelineConfig& cfg);
/// Image size implied by a decision for an original size.
Extent working_extent(WorkingResolution r, Extent original);

} // namespace bijmatch
