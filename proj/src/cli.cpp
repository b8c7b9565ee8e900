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

#include "bijmatch/cli.hpp"

#include "bijmatch/error.hpp"
#include "bijmatch/evaluation.hpp"
#include "bijmatch/interchange.hpp"
#include "bijmatch/keyvalue.hpp"
#include "bijmatch/matching.hpp"
#include "bijmatch/pipeline.hpp"
#include "bijmatch/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>

namespace fs = std::filesystem;

namespace bijmatch {

namespace {

// Bad flag values detected after CLI11 accepted the syntax.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error("usage", what) {}
};

TopK parse_k_flag(const std::string& flag, const std::string& text) {
    try {
        return TopK::parse(text);
    } catch (const InvalidArgument& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string frame_stem(int t) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d", t);
    return buf;
}

std::string object_file(int t, int k, const std::string& suffix) {
    return frame_stem(t) + "_obj" + std::to_string(k) + suffix;
}

Tensor pair_tensor(const ScoreMapPair& s) {
    std::vector<float> v;
    v.reserve(2 * s.extent.area());
    for (double x : s.bg)
        v.push_back(static_cast<float>(x));
    for (double x : s.fg)
        v.push_back(static_cast<float>(x));
    return Tensor::of_floats({2u, static_cast<std::uint32_t>(s.extent.height), static_cast<std::uint32_t>(s.extent.width)},
                             std::move(v));
}

// Prediction directories hold NNNN_objK.png files, optionally under masks/.
std::vector<LabelMask> read_prediction_dir(const fs::path& root) {
    const fs::path dir = fs::is_directory(root / "masks") ? root / "masks" : root;
    if (!fs::is_directory(dir))
        throw ValidationError("prediction directory " + root.string() + " does not exist");
    int objects = 0;
    while (fs::exists(dir / object_file(0, objects + 1, ".png")))
        ++objects;
    if (objects == 0)
        throw ValidationError("no prediction masks in " + dir.string() + " (expected " + object_file(0, 1, ".png") + ")");
    std::vector<LabelMask> out;
    for (int t = 0; fs::exists(dir / object_file(t, 1, ".png")); ++t) {
        LabelMask labels;
        for (int k = 1; k <= objects; ++k) {
            const fs::path p = dir / object_file(t, k, ".png");
            if (!fs::exists(p))
                throw ValidationError("missing prediction mask " + p.string());
            const BinaryMask m = read_mask_png(p);
            if (k == 1)
                labels = LabelMask(m.extent);
            else if (m.extent != labels.extent)
                throw ValidationError(p.string() + ": size " + m.extent.to_string() + " differs from object 1");
            for (std::size_t i = 0; i < m.bits.size(); ++i)
                if (m.bits[i] && labels.labels[i] == 0)
                    labels.labels[i] = static_cast<std::uint8_t>(k);
        }
        out.push_back(std::move(labels));
    }
    return out;
}

ProbMask load_reference_mask(const fs::path& path, Extent grid) {
    if (path.extension() == ".bmt") {
        const FeatureMap plane = to_feature_map(read_tensor(path));
        if (plane.channels() != 1 || plane.extent() != grid)
            throw ValidationError(path.string() + ": expected a 1 x " + grid.to_string() + " foreground tensor");
        std::vector<double> fg(plane.data().begin(), plane.data().end());
        return ProbMask::from_foreground(grid, std::move(fg));
    }
    const BinaryMask m = read_mask_png(path);
    const ProbMask full = ProbMask::from_binary(m.extent, m.bits);
    return m.extent == grid ? full : downsample_mask(full, grid.height, grid.width);
}

int cmd_run(const fs::path& bundle_dir, const fs::path& out_dir, const std::string& k_global,
            const std::string& k_local, int history, std::optional<std::uint64_t> seed,
            const std::optional<fs::path>& weights, bool dump_scores, std::ostream& out) {
    PipelineConfig cfg;
    cfg.k_global = parse_k_flag("--k-global", k_global);
    cfg.k_local = parse_k_flag("--k-local", k_local);
    if (history < 1)
        throw UsageError("--history: must be >= 1, got " + std::to_string(history));
    cfg.history_l = history;
    if (weights)
        cfg.weights_source = *weights;
    else
        cfg.weights_source = seed.value_or(0);

    const SequenceBundle bundle = read_bundle(bundle_dir);
    const auto preds = run_sequence(bundle, cfg);

    make_dir(out_dir / "masks");
    const int objects = static_cast<int>(bundle.initial_masks().size());
    for (std::size_t t = 0; t < preds.size(); ++t)
        for (int k = 1; k <= objects; ++k)
            write_mask_png(preds[t].labels.object(k), out_dir / "masks" / object_file(static_cast<int>(t), k, ".png"));

    if (dump_scores) {
        const fs::path sdir = out_dir / "scores";
        make_dir(sdir);
        for (std::size_t t = 1; t < preds.size(); ++t) {
            for (int k = 1; k <= objects; ++k) {
                const ObjectDiagnostics& d = preds[t].diagnostics[static_cast<std::size_t>(k - 1)];
                const int ti = static_cast<int>(t);
                write_tensor(pair_tensor(d.global), sdir / object_file(ti, k, "_global.bmt"));
                write_tensor(pair_tensor(d.local), sdir / object_file(ti, k, "_local.bmt"));
                write_tensor(plane_tensor(d.decoded.fg(), d.decoded.extent()), sdir / object_file(ti, k, "_decoded.bmt"));
                render_score_map(d.global.fg, d.global.extent, sdir / object_file(ti, k, "_global_fg.png"));
                render_score_map(d.local.fg, d.local.extent, sdir / object_file(ti, k, "_local_fg.png"));
            }
        }
    }

    KeyValueDoc summary;
    summary.set("frames", static_cast<int>(preds.size()));
    summary.set("objects", objects);
    summary.set("k_global", cfg.k_global.to_string());
    summary.set("k_local", cfg.k_local.to_string());
    summary.set("history", cfg.history_l);
    summary.set("weights", weights ? weights->string() : "seed " + std::to_string(seed.value_or(0)));
    summary.save(out_dir / "run.txt");
    out << "wrote " << preds.size() << " frames x " << objects << " objects to " << (out_dir / "masks").string() << "\n";
    return kExitOk;
}

int cmd_match(const fs::path& ref_path, const fs::path& query_path, const fs::path& mask_path, const fs::path& out_dir,
              const std::string& k_text, std::ostream& out) {
    const TopK k = parse_k_flag("--k", k_text);
    const FeatureMap ref = to_feature_map(read_tensor(ref_path));
    const FeatureMap query = to_feature_map(read_tensor(query_path));
    if (ref.channels() != query.channels())
        throw ValidationError("channel mismatch: reference has " + std::to_string(ref.channels()) + ", query has " +
                              std::to_string(query.channels()));
    const ProbMask mask = load_reference_mask(mask_path, ref.extent());
    const MatchMode mode = k.is_infinite() ? MatchMode::surjective() : MatchMode::bijective(k);
    const ScoreMapPair s = match(ref, query, mask, mode);
    make_dir(out_dir);
    write_tensor(plane_tensor(s.bg, s.extent), out_dir / "bg.bmt");
    write_tensor(plane_tensor(s.fg, s.extent), out_dir / "fg.bmt");
    out << "wrote " << (out_dir / "bg.bmt").string() << " and " << (out_dir / "fg.bmt").string() << "\n";
    return kExitOk;
}

int cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& report_path, std::ostream& out) {
    const SequenceBundle bundle = read_bundle(gt_dir);
    std::vector<LabelMask> gts;
    for (std::size_t t = 0; t < bundle.ground_truth.size(); ++t) {
        if (bundle.ground_truth[t].empty())
            throw ValidationError("ground truth missing for frame " + frame_stem(static_cast<int>(t)));
        gts.push_back(bundle.ground_truth_labels(t));
    }
    const std::vector<LabelMask> preds = read_prediction_dir(pred_dir);
    if (preds.size() != gts.size())
        throw ValidationError("frame count mismatch: " + std::to_string(preds.size()) + " predicted frames, " +
                              std::to_string(gts.size()) + " ground-truth frames");
    for (std::size_t t = 0; t < gts.size(); ++t)
        if (preds[t].extent != gts[t].extent)
            throw ValidationError("frame " + frame_stem(static_cast<int>(t)) + ": prediction is " +
                                  preds[t].extent.to_string() + ", ground truth is " + gts[t].extent.to_string());
    const EvalReport r = evaluate_sequence(preds, gts, bundle.manifest.objects);
    if (report_path.has_parent_path())
        make_dir(report_path.parent_path());
    write_report(r, report_path);
    char buf[96];
    std::snprintf(buf, sizeof buf, "J_mean=%.4f F_mean=%.4f G_mean=%.4f\n", r.j_mean, r.f_mean, r.g_mean);
    out << buf;
    return kExitOk;
}

int cmd_synth(const std::optional<fs::path>& config, const fs::path& out_dir, std::optional<std::uint64_t> seed,
              std::ostream& out) {
    KeyValueDoc doc = config ? KeyValueDoc::load(*config) : KeyValueDoc{};
    SceneConfig cfg = SceneConfig::from_doc(doc);
    if (seed)
        cfg.seed = *seed;
    const SyntheticScene scene = generate_scene(cfg);
    write_bundle(scene.bundle, out_dir);
    out << "wrote " << cfg.frames << " frames to " << out_dir.string() << "\n";
    return kExitOk;
}

int cmd_viz(const fs::path& in, const fs::path& out_path, int scale, std::ostream& out) {
    if (scale < 1)
        throw UsageError("--scale: must be >= 1, got " + std::to_string(scale));
    const Tensor t = read_tensor(in);
    if (t.dtype != DType::f32)
        throw ValidationError(in.string() + ": expected a float32 tensor");
    const bool plane = t.dims.size() == 2 || (t.dims.size() == 3 && t.dims[0] == 1);
    if (!plane)
        throw ValidationError(in.string() + ": expected an H x W or 1 x H x W tensor");
    const Extent e{static_cast<int>(t.dims[t.dims.size() - 2]), static_cast<int>(t.dims.back())};
    std::vector<double> y(t.f32.begin(), t.f32.end());
    for (double v : y)
        if (!std::isfinite(v))
            throw InvalidInput(in.string() + ": non-finite score");
    render_score_map(y, e, out_path, scale);
    out << "wrote " << out_path.string() << "\n";
    return kExitOk;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& what) {
    std::string msg = what;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "bijmatch: error: " << kind << ": " << msg << "\n";
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bijective feature matching for video object segmentation", "bijmatch"};
    app.set_version_flag("--version", std::string("bijmatch ") + kToolVersion + " (tensor format BMT1, bundle format " +
                                          std::to_string(kFormatVersion) + ")");
    app.require_subcommand(1);

    std::string bundle_dir, out_dir, k_global = "inf", k_local = "4", weights;
    int history = 3;
    std::uint64_t seed = 0;
    bool dump_scores = false;
    auto* run = app.add_subcommand("run", "segment a bundle");
    run->add_option("--bundle", bundle_dir, "bundle directory")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--k-global", k_global, "top-K for global matching (integer or inf)")->capture_default_str();
    run->add_option("--k-local", k_local, "top-K for local matching (integer or inf)")->capture_default_str();
    run->add_option("--history", history, "number of past masks fed to the position embedding")->capture_default_str();
    auto* seed_opt = run->add_option("--seed", seed, "seed for the embedding weights");
    auto* weights_opt = run->add_option("--weights", weights, "embedding weights file");
    seed_opt->excludes(weights_opt);
    run->add_flag("--dump-scores", dump_scores, "write per-frame score maps");

    std::string ref, query, mask, match_out, k_match = "inf";
    auto* match_cmd = app.add_subcommand("match", "match one reference/query pair");
    match_cmd->add_option("--ref", ref, "reference features (.bmt)")->required();
    match_cmd->add_option("--query", query, "query features (.bmt)")->required();
    match_cmd->add_option("--mask", mask, "reference mask (.png or .bmt)")->required();
    match_cmd->add_option("--out", match_out, "output directory")->required();
    match_cmd->add_option("--k", k_match, "top-K (integer or inf)")->capture_default_str();

    std::string pred, gt, report;
    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    eval->add_option("--pred", pred, "prediction directory")->required();
    eval->add_option("--gt", gt, "bundle directory with ground truth")->required();
    eval->add_option("--report", report, "report file")->required();

    std::string config, synth_out;
    std::uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "generate a synthetic bundle");
    auto* config_opt = synth->add_option("--config", config, "scene config file");
    synth->add_option("--out", synth_out, "bundle directory")->required();
    auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "scene seed (overrides the config)");

    std::string viz_in, viz_out;
    int viz_scale = 16;
    auto* viz = app.add_subcommand("viz-scores", "render a score map");
    viz->add_option("--in", viz_in, "H x W float tensor")->required();
    viz->add_option("--out", viz_out, "PNG path")->required();
    viz->add_option("--scale", viz_scale, "upscale factor")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        print_error(err, "usage", e.what());
        return kExitUsage;
    }

    try {
        if (*run)
            return cmd_run(bundle_dir, out_dir, k_global, k_local, history,
                           seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
                           weights_opt->count() ? std::optional<fs::path>(weights) : std::nullopt, dump_scores, out);
        if (*match_cmd)
            return cmd_match(ref, query, mask, match_out, k_match, out);
        if (*eval)
            return cmd_eval(pred, gt, report, out);
        if (*synth)
            return cmd_synth(config_opt->count() ? std::optional<fs::path>(config) : std::nullopt, synth_out,
                             synth_seed_opt->count() ? std::optional<std::uint64_t>(synth_seed) : std::nullopt, out);
        if (*viz)
            return cmd_viz(viz_in, viz_out, viz_scale, out);
    } catch (const UsageError& e) {
        print_error(err, e.kind(), e.what());
        return kExitUsage;
    } catch (const Error& e) {
        print_error(err, e.kind(), e.what());
        return kExitFailure;
    } catch (const std::exception& e) {
        print_error(err, "internal", e.what());
        return kExitFailure;
    }
    print_error(err, "usage", "no subcommand given");
    return kExitUsage;
}

} // namespace bijmatch
