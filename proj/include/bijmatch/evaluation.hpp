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

#include <filesystem>
#include <string>
#include <vector>

namespace bijmatch {

inline constexpr double kDefaultBoundaryTolerance = 0.008;

/// Intersection over union; 1 when both masks are empty.
double region_accuracy_j(const BinaryMask& pred, const BinaryMask& gt);

/// Pixels of the mask with a 4-neighbour outside the mask or off the image.
BinaryMask mask_boundary(const BinaryMask& m);

/// Boundary F-measure. Each boundary is dilated by a disk of radius
/// round(tol_factor * image diagonal); precision is the share of predicted
/// boundary pixels inside the dilated ground-truth boundary, recall the
/// converse. 1 when both masks are empty, 0 when P + R == 0.
double contour_accuracy_f(const BinaryMask& pred, const BinaryMask& gt,
                          double tol_factor = kDefaultBoundaryTolerance);

struct ObjectScores {
    std::vector<int> frames; // evaluated frame indices
    std::vector<double> j;
    std::vector<double> f;
    double j_mean = 0.0;
    double f_mean = 0.0;
};

struct EvalReport {
    int frame_count = 0;
    int object_count = 0;
    std::vector<ObjectScores> objects;
    double j_mean = 0.0; // mean over objects of per-object means
    double f_mean = 0.0;
    double g_mean = 0.0; // (j_mean + f_mean) / 2
};

/// Scores frames 1..T-1 (frame 0 is given). A single-frame sequence scores
/// frame 0 instead. Objects are 1..max label found in the ground truth, or
/// `object_count` when positive.
EvalReport evaluate_sequence(const std::vector<LabelMask>& preds, const std::vector<LabelMask>& gts,
                             int object_count = 0, double tol_factor = kDefaultBoundaryTolerance);

/// Key/value summary followed by one table per object.
std::string format_report(const EvalReport& r);
void write_report(const EvalReport& r, const std::filesystem::path& path);

} // namespace bijmatch
