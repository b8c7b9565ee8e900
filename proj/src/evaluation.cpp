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

#include "bijmatch/evaluation.hpp"

#include "bijmatch/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace bijmatch {

namespace {

void require_same_extent(const BinaryMask& a, const BinaryMask& b, const char* what) {
    if (a.extent != b.extent || a.bits.size() != a.extent.area() || b.bits.size() != b.extent.area())
        throw InvalidArgument(std::string(what) + ": shape mismatch (" + a.extent.to_string() + " vs " +
                              b.extent.to_string() + ")");
}

BinaryMask dilate_disk(const BinaryMask& m, int radius) {
    if (radius <= 0)
        return m;
    const int h = m.extent.height;
    const int w = m.extent.width;
    std::vector<int> half(static_cast<std::size_t>(radius) + 1);
    for (int dy = 0; dy <= radius; ++dy)
        half[static_cast<std::size_t>(dy)] = static_cast<int>(std::floor(std::sqrt(double(radius * radius - dy * dy))));
    BinaryMask out(m.extent);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(y, x))
                continue;
            for (int dy = -radius; dy <= radius; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h)
                    continue;
                const int span = half[static_cast<std::size_t>(std::abs(dy))];
                const int x0 = std::max(0, x - span);
                const int x1 = std::min(w - 1, x + span);
                for (int xx = x0; xx <= x1; ++xx)
                    out.set(yy, xx, true);
            }
        }
    }
    return out;
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

double region_accuracy_j(const BinaryMask& pred, const BinaryMask& gt) {
    require_same_extent(pred, gt, "region_accuracy_j");
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < pred.bits.size(); ++i) {
        const bool a = pred.bits[i] != 0;
        const bool b = gt.bits[i] != 0;
        inter += a && b;
        uni += a || b;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask mask_boundary(const BinaryMask& m) {
    const int h = m.extent.height;
    const int w = m.extent.width;
    BinaryMask out(m.extent);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(y, x))
                continue;
            const bool edge = y == 0 || x == 0 || y == h - 1 || x == w - 1 || !m.at(y - 1, x) || !m.at(y + 1, x) ||
                              !m.at(y, x - 1) || !m.at(y, x + 1);
            out.set(y, x, edge);
        }
    }
    return out;
}

double contour_accuracy_f(const BinaryMask& pred, const BinaryMask& gt, double tol_factor) {
    require_same_extent(pred, gt, "contour_accuracy_f");
    const BinaryMask pb = mask_boundary(pred);
    const BinaryMask gb = mask_boundary(gt);
    const std::size_t np = pb.count();
    const std::size_t ng = gb.count();
    if (np == 0 && ng == 0)
        return 1.0;
    if (np == 0 || ng == 0)
        return 0.0;
    const double diag = std::hypot(static_cast<double>(pred.extent.height), static_cast<double>(pred.extent.width));
    const int radius = static_cast<int>(std::lround(tol_factor * diag));
    const BinaryMask pd = dilate_disk(pb, radius);
    const BinaryMask gd = dilate_disk(gb, radius);
    std::size_t pred_hits = 0;
    std::size_t gt_hits = 0;
    for (std::size_t i = 0; i < pb.bits.size(); ++i) {
        pred_hits += pb.bits[i] && gd.bits[i];
        gt_hits += gb.bits[i] && pd.bits[i];
    }
    const double precision = static_cast<double>(pred_hits) / static_cast<double>(np);
    const double recall = static_cast<double>(gt_hits) / static_cast<double>(ng);
    if (precision + recall == 0.0)
        return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

EvalReport evaluate_sequence(const std::vector<LabelMask>& preds, const std::vector<LabelMask>& gts, int object_count,
                             double tol_factor) {
    if (preds.size() != gts.size())
        throw InvalidArgument("evaluate_sequence: " + std::to_string(preds.size()) + " predicted frames vs " +
                              std::to_string(gts.size()) + " ground-truth frames");
    if (gts.empty())
        throw InvalidArgument("evaluate_sequence: empty sequence");
    for (std::size_t t = 0; t < gts.size(); ++t)
        if (preds[t].extent != gts[t].extent)
            throw InvalidArgument("evaluate_sequence: frame " + std::to_string(t) + " shape mismatch (" +
                                  preds[t].extent.to_string() + " vs " + gts[t].extent.to_string() + ")");
    int objects = object_count;
    if (objects <= 0)
        for (const auto& g : gts)
            objects = std::max(objects, g.max_label());

    EvalReport r;
    r.frame_count = static_cast<int>(gts.size());
    r.object_count = objects;
    const std::size_t first = gts.size() == 1 ? 0 : 1;
    std::vector<double> j_means;
    std::vector<double> f_means;
    for (int k = 1; k <= objects; ++k) {
        ObjectScores s;
        for (std::size_t t = first; t < gts.size(); ++t) {
            const BinaryMask p = preds[t].object(k);
            const BinaryMask g = gts[t].object(k);
            s.frames.push_back(static_cast<int>(t));
            s.j.push_back(region_accuracy_j(p, g));
            s.f.push_back(contour_accuracy_f(p, g, tol_factor));
        }
        s.j_mean = mean(s.j);
        s.f_mean = mean(s.f);
        j_means.push_back(s.j_mean);
        f_means.push_back(s.f_mean);
        r.objects.push_back(std::move(s));
    }
    r.j_mean = mean(j_means);
    r.f_mean = mean(f_means);
    r.g_mean = (r.j_mean + r.f_mean) / 2.0;
    return r;
}

std::string format_report(const EvalReport& r) {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    std::string out;
    out += "# segmentation evaluation\n";
    out += "frames = " + std::to_string(r.frame_count) + "\n";
    out += "objects = " + std::to_string(r.object_count) + "\n";
    out += "J_mean = " + num(r.j_mean) + "\n";
    out += "F_mean = " + num(r.f_mean) + "\n";
    out += "G_mean = " + num(r.g_mean) + "\n";
    for (std::size_t k = 0; k < r.objects.size(); ++k) {
        const ObjectScores& s = r.objects[k];
        const std::string prefix = "object" + std::to_string(k + 1);
        out += "\n" + prefix + ".J_mean = " + num(s.j_mean) + "\n";
        out += prefix + ".F_mean = " + num(s.f_mean) + "\n";
        out += "# " + prefix + ".frame.<t> = J F\n";
        for (std::size_t i = 0; i < s.frames.size(); ++i)
            out += prefix + ".frame." + std::to_string(s.frames[i]) + " = " + num(s.j[i]) + " " + num(s.f[i]) + "\n";
    }
    return out;
}

void write_report(const EvalReport& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << format_report(r);
    if (!out)
        throw IoError("write failed: " + path.string());
}

} // namespace bijmatch
