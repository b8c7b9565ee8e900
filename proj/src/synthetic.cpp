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

#include "bijmatch/synthetic.hpp"

#include "bijmatch/error.hpp"
#include "bijmatch/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

namespace bijmatch {

namespace {

constexpr int kPaletteSize = 4;

struct Track {
    ShapeKind shape;
    int h, w, y0, x0, vy, vx;
};

bool inside(const Track& tr, std::pair<int, int> pos, double py, double px) {
    const double top = pos.first;
    const double left = pos.second;
    if (tr.shape == ShapeKind::rectangle)
        return py >= top && py < top + tr.h && px >= left && px < left + tr.w;
    const double r = tr.h / 2.0;
    const double dy = py - (top + r);
    const double dx = px - (left + r);
    return dy * dy + dx * dx <= r * r;
}

int track_width(const Track& tr) {
    return tr.shape == ShapeKind::disk ? tr.h : tr.w;
}

std::pair<int, int> position_at(const Track& tr, Extent grid, int t) {
    return track_position(tr.y0, tr.x0, tr.vy, tr.vx, tr.h, track_width(tr), grid, t);
}

using Vec = std::vector<double>;

Vec random_unit(Rng& rng, int dim) {
    Vec v(static_cast<std::size_t>(dim));
    double n = 0.0;
    while (n < 1e-6) {
        n = 0.0;
        for (double& x : v) {
            x = rng.normal();
            n += x * x;
        }
    }
    n = std::sqrt(n);
    for (double& x : v)
        x /= n;
    return v;
}

// Orthonormal vectors while the dimension allows, random unit vectors after.
std::vector<Vec> base_vectors(Rng& rng, int count, int dim) {
    std::vector<Vec> out;
    for (int i = 0; i < count; ++i) {
        Vec v = random_unit(rng, dim);
        if (i < dim) {
            for (int attempt = 0; attempt < 8; ++attempt) {
                for (const Vec& u : out) {
                    double d = 0.0;
                    for (int c = 0; c < dim; ++c)
                        d += v[static_cast<std::size_t>(c)] * u[static_cast<std::size_t>(c)];
                    for (int c = 0; c < dim; ++c)
                        v[static_cast<std::size_t>(c)] -= d * u[static_cast<std::size_t>(c)];
                }
                double n = 0.0;
                for (double x : v)
                    n += x * x;
                n = std::sqrt(n);
                if (n > 1e-6) {
                    for (double& x : v)
                        x /= n;
                    break;
                }
                v = random_unit(rng, dim);
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<double> gaussian_kernel(double sigma) {
    if (sigma <= 0.0)
        return {1.0};
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double s = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (sigma * sigma));
        s += k[static_cast<std::size_t>(i + r)];
    }
    for (double& v : k)
        v /= s;
    return k;
}

// C x h x w stationary Gaussian field with per-value standard deviation
// `sigma`, correlated over `smoothing` cells. Generated with a margin so the
// statistics do not sag at the borders.
std::vector<double> texture_field(Rng& rng, int channels, int h, int w, double sigma, double smoothing) {
    const auto k = gaussian_kernel(smoothing);
    const int r = static_cast<int>(k.size() / 2);
    double k2 = 0.0;
    for (double v : k)
        k2 += v * v;
    const double gain = sigma / k2; // 2D: std = sqrt(k2 * k2)
    const int hh = h + 2 * r;
    const int ww = w + 2 * r;
    std::vector<double> out(static_cast<std::size_t>(channels) * h * w);
    std::vector<double> white(static_cast<std::size_t>(hh) * ww);
    std::vector<double> tmp(static_cast<std::size_t>(hh) * w);
    for (int c = 0; c < channels; ++c) {
        for (double& v : white)
            v = rng.normal();
        for (int y = 0; y < hh; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = 0; i < static_cast<int>(k.size()); ++i)
                    acc += k[static_cast<std::size_t>(i)] * white[static_cast<std::size_t>(y) * ww + x + i];
                tmp[static_cast<std::size_t>(y) * w + x] = acc;
            }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = 0; i < static_cast<int>(k.size()); ++i)
                    acc += k[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>(y + i) * w + x];
                out[(static_cast<std::size_t>(c) * h + y) * w + x] = acc * gain;
            }
    }
    (void)r;
    return out;
}

const char* shape_name(ShapeKind s) {
    return s == ShapeKind::disk ? "disk" : "rect";
}

ShapeKind parse_shape(const std::string& s) {
    if (s == "rect" || s == "rectangle")
        return ShapeKind::rectangle;
    if (s == "disk")
        return ShapeKind::disk;
    throw ConfigError("unknown shape '" + s + "' (expected rect or disk)");
}

std::pair<int, int> pair_of(const KeyValueDoc& doc, const std::string& key, std::pair<int, int> fallback) {
    if (!doc.has(key))
        return fallback;
    const auto v = doc.get_ints(key);
    if (v.size() != 2)
        throw ConfigError(key + ": expected two integers");
    return {v[0], v[1]};
}

std::string pair_text(int a, int b) {
    return std::to_string(a) + " " + std::to_string(b);
}

} // namespace

std::pair<int, int> track_position(int y0, int x0, int vy, int vx, int size_h, int size_w, Extent grid, int t) {
    const int y = std::clamp(y0 + vy * t, 0, std::max(0, grid.height - size_h));
    const int x = std::clamp(x0 + vx * t, 0, std::max(0, grid.width - size_w));
    return {y, x};
}

void SceneConfig::validate() const {
    if (frames < 1)
        throw ConfigError("frames must be >= 1");
    if (!grid.valid())
        throw ConfigError("grid dimensions must be positive");
    if (channels < 1)
        throw ConfigError("channels must be >= 1");
    if (objects.empty())
        throw ConfigError("at least one object is required");
    if (objects.size() > 255)
        throw ConfigError("at most 255 objects");
    if (!(noise_sigma >= 0.0) || !(texture_smoothing >= 0.0))
        throw ConfigError("noise_sigma and texture_smoothing must be >= 0");
    if (texture_cell < 1)
        throw ConfigError("texture_cell must be >= 1");
    auto check_box = [this](const std::string& name, ShapeKind shape, int h, int w) {
        const int width = shape == ShapeKind::disk ? h : w;
        if (h < 1 || width < 1)
            throw ConfigError(name + ": size must be positive");
        if (h > grid.height || width > grid.width)
            throw ConfigError(name + ": size " + pair_text(h, width) + " does not fit the " + grid.to_string() + " grid");
    };
    for (std::size_t i = 0; i < objects.size(); ++i)
        check_box("object" + std::to_string(i + 1), objects[i].shape, objects[i].size_h, objects[i].size_w);
    for (std::size_t i = 0; i < distractors.size(); ++i) {
        const DistractorSpec& d = distractors[i];
        if (d.mimics < 1 || d.mimics > static_cast<int>(objects.size()))
            throw ConfigError("distractor" + std::to_string(i + 1) + ": mimics unknown object " + std::to_string(d.mimics));
        if (d.enter_frame < 0)
            throw ConfigError("distractor" + std::to_string(i + 1) + ": enter_frame must be >= 0");
    }
}

SceneConfig SceneConfig::from_doc(const KeyValueDoc& doc) {
    SceneConfig cfg;
    cfg.frames = doc.get_int("frames", cfg.frames);
    cfg.grid.height = doc.get_int("height", cfg.grid.height);
    cfg.grid.width = doc.get_int("width", cfg.grid.width);
    cfg.channels = doc.get_int("channels", cfg.channels);
    cfg.noise_sigma = doc.get_double("noise_sigma", cfg.noise_sigma);
    cfg.texture_smoothing = doc.get_double("texture_smoothing", cfg.texture_smoothing);
    cfg.texture_cell = doc.get_int("texture_cell", cfg.texture_cell);
    if (auto s = doc.get("seed"))
        cfg.seed = static_cast<std::uint64_t>(std::stoull(*s));
    const int n_obj = doc.get_int("objects", 1);
    cfg.objects.assign(static_cast<std::size_t>(std::max(0, n_obj)), ObjectSpec{});
    for (int i = 0; i < n_obj; ++i) {
        const std::string p = "object" + std::to_string(i + 1) + ".";
        ObjectSpec& o = cfg.objects[static_cast<std::size_t>(i)];
        if (auto s = doc.get(p + "shape"))
            o.shape = parse_shape(*s);
        std::tie(o.size_h, o.size_w) = pair_of(doc, p + "size", {o.size_h, o.size_w});
        std::tie(o.y, o.x) = pair_of(doc, p + "position", {o.y, o.x});
        std::tie(o.vy, o.vx) = pair_of(doc, p + "velocity", {o.vy, o.vx});
    }
    const int n_dis = doc.get_int("distractors", 0);
    cfg.distractors.assign(static_cast<std::size_t>(std::max(0, n_dis)), DistractorSpec{});
    for (int i = 0; i < n_dis; ++i) {
        const std::string p = "distractor" + std::to_string(i + 1) + ".";
        DistractorSpec& d = cfg.distractors[static_cast<std::size_t>(i)];
        if (auto s = doc.get(p + "appearance")) {
            if (*s != "same" && *s != "distinct")
                throw ConfigError(p + "appearance: expected same or distinct");
            d.same_appearance = *s == "same";
        }
        d.mimics = doc.get_int(p + "mimics", d.mimics);
        std::tie(d.offset_y, d.offset_x) = pair_of(doc, p + "offset", {d.offset_y, d.offset_x});
        std::tie(d.vy, d.vx) = pair_of(doc, p + "velocity", {d.vy, d.vx});
        d.enter_frame = doc.get_int(p + "enter_frame", d.enter_frame);
    }
    cfg.validate();
    return cfg;
}

KeyValueDoc SceneConfig::to_doc() const {
    KeyValueDoc doc;
    doc.set("frames", frames);
    doc.set("height", grid.height);
    doc.set("width", grid.width);
    doc.set("channels", channels);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", noise_sigma);
    doc.set("noise_sigma", std::string(buf));
    std::snprintf(buf, sizeof buf, "%.17g", texture_smoothing);
    doc.set("texture_smoothing", std::string(buf));
    doc.set("texture_cell", texture_cell);
    doc.set("seed", std::to_string(seed));
    doc.set("objects", static_cast<int>(objects.size()));
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const std::string p = "object" + std::to_string(i + 1) + ".";
        const ObjectSpec& o = objects[i];
        doc.set(p + "shape", std::string(shape_name(o.shape)));
        doc.set(p + "size", pair_text(o.size_h, o.size_w));
        doc.set(p + "position", pair_text(o.y, o.x));
        doc.set(p + "velocity", pair_text(o.vy, o.vx));
    }
    doc.set("distractors", static_cast<int>(distractors.size()));
    for (std::size_t i = 0; i < distractors.size(); ++i) {
        const std::string p = "distractor" + std::to_string(i + 1) + ".";
        const DistractorSpec& d = distractors[i];
        doc.set(p + "appearance", std::string(d.same_appearance ? "same" : "distinct"));
        doc.set(p + "mimics", d.mimics);
        doc.set(p + "offset", pair_text(d.offset_y, d.offset_x));
        doc.set(p + "velocity", pair_text(d.vy, d.vx));
        doc.set(p + "enter_frame", d.enter_frame);
    }
    return doc;
}

SceneConfig SceneConfig::distractor_benchmark(std::uint64_t seed, int frames, double noise_sigma) {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    SceneConfig cfg;
    cfg.frames = frames;
    cfg.noise_sigma = noise_sigma;
    cfg.seed = seed;
    // Target and distractor travel side by side in two horizontal lanes.
    const bool target_on_top = rng.uniform() < 0.5;
    const int lane_top = rng.uniform_int(1, 4);
    const int lane_bottom = rng.uniform_int(13, 17);
    const int direction = rng.uniform() < 0.5 ? 1 : -1;
    ObjectSpec target;
    target.size_h = 6;
    target.size_w = 6;
    target.y = target_on_top ? lane_top : lane_bottom;
    target.x = direction > 0 ? rng.uniform_int(0, 4) : rng.uniform_int(14, 18);
    target.vx = direction;
    cfg.objects = {target};
    DistractorSpec d;
    d.same_appearance = true;
    d.mimics = 1;
    d.offset_y = (target_on_top ? lane_bottom : lane_top) - target.y;
    d.offset_x = rng.uniform_int(-2, 2);
    d.vx = direction;
    d.enter_frame = 1;
    cfg.distractors = {d};
    return cfg;
}

SyntheticScene generate_scene(const SceneConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const Extent grid = cfg.grid;
    const Extent full = cfg.full();
    const int channels = cfg.channels;
    const std::size_t n_obj = cfg.objects.size();
    const std::size_t n_dis = cfg.distractors.size();

    // Base descriptors: objects, distinct distractors, background palette,
    // plus one helper direction for the contrasting palette entry.
    std::size_t n_distinct = 0;
    for (const auto& d : cfg.distractors)
        n_distinct += d.same_appearance ? 0 : 1;
    const auto bases = base_vectors(rng, static_cast<int>(n_obj + n_distinct + kPaletteSize), channels);
    std::vector<Vec> object_base(bases.begin(), bases.begin() + static_cast<std::ptrdiff_t>(n_obj));
    std::vector<Vec> distractor_base;
    std::size_t next = n_obj;
    for (const auto& d : cfg.distractors)
        distractor_base.push_back(d.same_appearance ? object_base[static_cast<std::size_t>(d.mimics - 1)] : bases[next++]);
    std::vector<Vec> palette(bases.begin() + static_cast<std::ptrdiff_t>(next),
                             bases.begin() + static_cast<std::ptrdiff_t>(next + kPaletteSize - 1));
    // The last palette entry points away from object 1.
    Vec contrast(static_cast<std::size_t>(channels));
    const Vec& helper = bases[next + kPaletteSize - 1];
    for (int c = 0; c < channels; ++c)
        contrast[static_cast<std::size_t>(c)] = -0.8 * object_base[0][static_cast<std::size_t>(c)] + 0.6 * helper[static_cast<std::size_t>(c)];
    palette.push_back(std::move(contrast));

    const int cells_y = (grid.height + cfg.texture_cell - 1) / cfg.texture_cell;
    const int cells_x = (grid.width + cfg.texture_cell - 1) / cfg.texture_cell;
    std::vector<int> cell_kind(static_cast<std::size_t>(cells_y) * cells_x);
    for (int& k : cell_kind)
        k = rng.uniform_int(0, kPaletteSize - 1);

    const auto bg_texture = texture_field(rng, channels, grid.height, grid.width, cfg.noise_sigma, cfg.texture_smoothing);
    std::vector<Track> obj_tracks;
    std::vector<std::vector<double>> obj_texture;
    for (const ObjectSpec& o : cfg.objects) {
        obj_tracks.push_back({o.shape, o.size_h, o.size_w, o.y, o.x, o.vy, o.vx});
        obj_texture.push_back(texture_field(rng, channels, o.size_h, track_width(obj_tracks.back()), cfg.noise_sigma,
                                            cfg.texture_smoothing));
    }
    std::vector<Track> dis_tracks;
    std::vector<std::vector<double>> dis_texture;
    for (const DistractorSpec& d : cfg.distractors) {
        const ObjectSpec& o = cfg.objects[static_cast<std::size_t>(d.mimics - 1)];
        dis_tracks.push_back({o.shape, o.size_h, o.size_w, o.y + d.offset_y, o.x + d.offset_x, d.vy, d.vx});
        dis_texture.push_back(texture_field(rng, channels, o.size_h, track_width(dis_tracks.back()), cfg.noise_sigma,
                                            cfg.texture_smoothing));
    }

    SyntheticScene scene;
    scene.bundle.ground_truth.resize(static_cast<std::size_t>(cfg.frames));
    const std::size_t plane = grid.area();
    for (int t = 0; t < cfg.frames; ++t) {
        std::vector<float> data(static_cast<std::size_t>(channels) * plane);
        auto put = [&](int y, int x, const Vec& base, const std::vector<double>& tex, int th, int tw, int ty, int tx) {
            for (int c = 0; c < channels; ++c) {
                const double v = base[static_cast<std::size_t>(c)] +
                                 tex[(static_cast<std::size_t>(c) * th + ty) * tw + tx];
                data[static_cast<std::size_t>(c) * plane + static_cast<std::size_t>(y) * grid.width + x] =
                    static_cast<float>(v);
            }
        };
        for (int y = 0; y < grid.height; ++y)
            for (int x = 0; x < grid.width; ++x) {
                const int kind = cell_kind[static_cast<std::size_t>(y / cfg.texture_cell) * cells_x + x / cfg.texture_cell];
                put(y, x, palette[static_cast<std::size_t>(kind)], bg_texture, grid.height, grid.width, y, x);
            }

        // Draw order: distractors, then objects by index; later draws occlude.
        std::vector<int> owner(plane, 0); // 0 background, -j distractor j, +k object k
        auto draw = [&](const Track& tr, const Vec& base, const std::vector<double>& tex, int tag) {
            const auto pos = position_at(tr, grid, t);
            const int tw = track_width(tr);
            for (int oy = 0; oy < tr.h; ++oy)
                for (int ox = 0; ox < tw; ++ox) {
                    const int y = pos.first + oy;
                    const int x = pos.second + ox;
                    if (y >= grid.height || x >= grid.width || !inside(tr, pos, y + 0.5, x + 0.5))
                        continue;
                    put(y, x, base, tex, tr.h, tw, oy, ox);
                    owner[static_cast<std::size_t>(y) * grid.width + x] = tag;
                }
        };
        for (std::size_t j = 0; j < n_dis; ++j)
            if (t >= cfg.distractors[j].enter_frame)
                draw(dis_tracks[j], distractor_base[j], dis_texture[j], -static_cast<int>(j + 1));
        for (std::size_t k = 0; k < n_obj; ++k)
            draw(obj_tracks[k], object_base[k], obj_texture[k], static_cast<int>(k + 1));
        scene.bundle.frames.emplace_back(channels, grid, std::move(data));

        std::vector<BinaryMask> obj_cells(n_obj, BinaryMask(grid));
        std::vector<BinaryMask> dis_cells(n_dis, BinaryMask(grid));
        for (std::size_t i = 0; i < plane; ++i) {
            if (owner[i] > 0)
                obj_cells[static_cast<std::size_t>(owner[i] - 1)].bits[i] = 1;
            else if (owner[i] < 0)
                dis_cells[static_cast<std::size_t>(-owner[i] - 1)].bits[i] = 1;
        }
        scene.object_cells.push_back(std::move(obj_cells));
        scene.distractor_cells.push_back(std::move(dis_cells));

        // Full-resolution ground truth from the same geometry.
        std::vector<std::pair<int, int>> pos(n_obj);
        for (std::size_t k = 0; k < n_obj; ++k)
            pos[k] = position_at(obj_tracks[k], grid, t);
        std::vector<BinaryMask> gt(n_obj, BinaryMask(full));
        for (int Y = 0; Y < full.height; ++Y) {
            const double py = (Y + 0.5) / kFeatureStride;
            for (int X = 0; X < full.width; ++X) {
                const double px = (X + 0.5) / kFeatureStride;
                for (std::size_t k = n_obj; k-- > 0;) {
                    if (inside(obj_tracks[k], pos[k], py, px)) {
                        gt[k].set(Y, X, true);
                        break;
                    }
                }
            }
        }
        scene.bundle.ground_truth[static_cast<std::size_t>(t)] = std::move(gt);
    }
    scene.bundle.manifest = make_manifest(scene.bundle);
    return scene;
}

} // namespace bijmatch
