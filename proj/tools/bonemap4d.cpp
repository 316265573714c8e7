// bonemap4d command line: renders dual depth/normal bone maps from skeleton
// animations, computes pelvis alignments, dumps ellipsoids/embeddings, and
// runs the progressive spatio-temporal sampling demo with toy denoisers.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bonemap4d/alignment.hpp"
#include "bonemap4d/camera.hpp"
#include "bonemap4d/ellipsoid.hpp"
#include "bonemap4d/embeddings.hpp"
#include "bonemap4d/errors.hpp"
#include "bonemap4d/grid_io.hpp"
#include "bonemap4d/image_io.hpp"
#include "bonemap4d/renderer.hpp"
#include "bonemap4d/sampler.hpp"
#include "bonemap4d/skeleton.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;

struct RenderArgs {
    std::string poses;
    std::string topology;
    std::string cameras;
    std::string out;
    int size = 0;  // 0 keeps the rig resolution
    std::string depth_mode = "euclidean";
    bool print_config = false;
};

struct AlignArgs {
    std::string poses;
    std::string cameras;
    std::string out;
    std::vector<int> target = {288, 288};
    std::vector<double> ref_pelvis;  // optional (u, v) in the reference image
    bool print_config = false;
};

struct InspectArgs {
    std::string poses;
    std::string topology;
    std::string cameras;
    std::string out;
    int frame = 0;
    int frames = 0;
    int dim = 64;
    double max_period = 10000.0;
    bool print_config = false;
};

struct SampleArgs {
    int frames = 24;
    int views = 8;
    bm4d::WindowConfig window;
    bool cyclic_views = true;
    int steps = 50;
    std::string denoiser = "identity";
    double contract_factor = 0.9;
    double pull = 0.5;
    double branch_mix = 0.5;
    std::uint64_t seed = 7;
    int channels = 4;
    int latent_h = 8;
    int latent_w = 8;
    std::string out;
    std::string metrics;
    bool print_config = false;
};

void maybe_print_config(bool enabled, const json& cfg) {
    if (enabled) std::cout << cfg.dump(1) << std::endl;
}

bm4d::CameraRig resize_rig(bm4d::CameraRig rig, int size) {
    if (size <= 0) return rig;
    const double sx = static_cast<double>(size) / rig.width;
    const double sy = static_cast<double>(size) / rig.height;
    rig.fx *= sx;
    rig.cx *= sx;
    rig.fy *= sy;
    rig.cy *= sy;
    rig.width = rig.height = size;
    rig.validate();
    return rig;
}

std::string cell_name(const char* kind, std::size_t frame, std::size_t view, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_f%03zu_v%02zu.%s", kind, frame, view, ext);
    return buf;
}

int run_render(const RenderArgs& args) {
    maybe_print_config(args.print_config,
                       json{{"subcommand", "render"},
                            {"poses", args.poses},
                            {"topology", args.topology.empty() ? "<default>" : args.topology},
                            {"cameras", args.cameras},
                            {"out", args.out},
                            {"size", args.size},
                            {"depth_mode", args.depth_mode}});

    const bm4d::PoseSequence poses = bm4d::load_pose_sequence(args.poses);
    const bm4d::BoneTopology topo =
        args.topology.empty() ? bm4d::default_topology() : bm4d::load_topology(args.topology);
    std::vector<bm4d::CameraRig> rigs = bm4d::load_cameras(args.cameras);
    for (auto& rig : rigs) rig = resize_rig(rig, args.size);

    bm4d::RenderOptions opts;
    opts.depth_mode = bm4d::parse_depth_mode(args.depth_mode);

    std::filesystem::create_directories(args.out);
    const std::filesystem::path out_dir(args.out);

    // One frame at a time keeps memory bounded by the view count.
    for (std::size_t t = 0; t < poses.frames.size(); ++t) {
        bm4d::PoseSequence one;
        one.frames.push_back(poses.frames[t]);
        const bm4d::BoneMapGrid grid = bm4d::render_sequence(one, topo, rigs, opts);
        for (std::size_t v = 0; v < rigs.size(); ++v) {
            const bm4d::BoneMap& map = grid[0][v];
            bm4d::write_pfm_depth(out_dir / cell_name("depth", t, v, "pfm"), map);
            bm4d::write_pfm_normal(out_dir / cell_name("normal", t, v, "pfm"), map);
            bm4d::write_png_gray8(out_dir / cell_name("depth", t, v, "png"),
                                  bm4d::depth_preview(map), map.width, map.height);
            bm4d::write_png_rgb8(out_dir / cell_name("normal", t, v, "png"),
                                 bm4d::normal_preview(map), map.width, map.height);
        }
    }
    return 0;
}

int run_align(const AlignArgs& args) {
    maybe_print_config(args.print_config, json{{"subcommand", "align"},
                                               {"poses", args.poses},
                                               {"cameras", args.cameras},
                                               {"target", args.target},
                                               {"out", args.out}});

    const bm4d::PoseSequence poses = bm4d::load_pose_sequence(args.poses);
    const std::vector<bm4d::CameraRig> rigs = bm4d::load_cameras(args.cameras);
    const double tu = args.target.at(0);
    const double tv = args.target.at(1);

    json shifts = json::array();
    for (const auto& frame : poses.frames) {
        json row = json::array();
        for (const auto& rig : rigs) {
            const bm4d::AlignmentTransform xf = bm4d::compute_view_alignment(frame, rig, tu, tv);
            row.push_back({xf.dx, xf.dy});
        }
        shifts.push_back(std::move(row));
    }

    json doc{{"target", {tu, tv}},
             {"frames", poses.frames.size()},
             {"views", rigs.size()},
             {"shifts", std::move(shifts)}};
    if (args.ref_pelvis.size() == 2) {
        const bm4d::AlignmentTransform xf = bm4d::compute_temporal_alignment(
            args.ref_pelvis[0], args.ref_pelvis[1], poses.frames.front(), rigs.front());
        doc["temporal"] = {{"dx", xf.dx}, {"dy", xf.dy}};
    }
    bm4d::write_file_atomic(args.out, doc.dump(1) + "\n");
    return 0;
}

void emit(const std::string& out, const json& doc) {
    if (out.empty())
        std::cout << doc.dump(1) << std::endl;
    else
        bm4d::write_file_atomic(out, doc.dump(1) + "\n");
}

int run_inspect_ellipsoids(const InspectArgs& args) {
    maybe_print_config(args.print_config, json{{"subcommand", "inspect ellipsoids"},
                                               {"poses", args.poses},
                                               {"frame", args.frame}});
    const bm4d::PoseSequence poses = bm4d::load_pose_sequence(args.poses);
    const bm4d::BoneTopology topo =
        args.topology.empty() ? bm4d::default_topology() : bm4d::load_topology(args.topology);
    if (args.frame < 0 || args.frame >= static_cast<int>(poses.frames.size()))
        throw bm4d::ValueError("frame index out of range");

    json list = json::array();
    for (const auto& e : bm4d::build_skeleton_ellipsoids(poses.frames[args.frame], topo)) {
        json rot = json::array();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) rot.push_back(e.rotation(r, c));
        list.push_back({{"bone", e.bone_id},
                        {"parent", topo.edges[e.bone_id].parent},
                        {"child", topo.edges[e.bone_id].child},
                        {"center", {e.center.x(), e.center.y(), e.center.z()}},
                        {"radii", {e.radii.x(), e.radii.y(), e.radii.z()}},
                        {"rotation", std::move(rot)}});
    }
    emit(args.out, json{{"frame", args.frame}, {"ellipsoids", std::move(list)}});
    return 0;
}

int run_inspect_embeddings(const InspectArgs& args) {
    maybe_print_config(args.print_config, json{{"subcommand", "inspect embeddings"},
                                               {"cameras", args.cameras},
                                               {"frames", args.frames},
                                               {"dim", args.dim},
                                               {"max_period", args.max_period}});
    bm4d::EmbeddingConfig cfg;
    cfg.dim = args.dim;
    cfg.max_period = args.max_period;
    cfg.validate();

    json doc{{"dim", cfg.dim}, {"max_period", cfg.max_period}};
    if (!args.cameras.empty()) {
        const auto rigs = bm4d::load_cameras(args.cameras);
        json cams = json::array();
        const auto rels = bm4d::relative_rotation(rigs);
        for (std::size_t v = 0; v < rels.size(); ++v)
            cams.push_back({{"view", v}, {"values", bm4d::embed_camera(rels[v], cfg).values}});
        doc["camera"] = std::move(cams);
    }
    if (args.frames > 0) {
        json frames = json::array();
        for (int t = 0; t < args.frames; ++t)
            frames.push_back({{"t", t}, {"values", bm4d::embed_frame_index(t, cfg)}});
        doc["frames"] = std::move(frames);
    }
    emit(args.out, doc);
    return 0;
}

int run_sample_demo(const SampleArgs& args) {
    maybe_print_config(
        args.print_config,
        json{{"subcommand", "sample-demo"},
             {"frames", args.frames},
             {"views", args.views},
             {"t_long", args.window.t_long},
             {"t_ol", args.window.t_ol},
             {"t_short", args.window.t_short},
             {"n_long", args.window.n_long},
             {"n_ol", args.window.n_ol},
             {"n_short", args.window.n_short},
             {"cyclic_views", args.cyclic_views},
             {"steps", args.steps},
             {"denoiser", args.denoiser},
             {"branch_mix", args.branch_mix},
             {"seed", args.seed},
             {"latent", {args.channels, args.latent_h, args.latent_w}},
             {"out", args.out}});

    if (args.steps < 1) throw bm4d::ConfigError("--steps must be at least 1");
    const bm4d::WindowPlan plan =
        bm4d::plan_windows(args.frames, args.views, args.window, args.cyclic_views);

    std::unique_ptr<bm4d::DenoiserInterface> den;
    if (args.denoiser == "identity")
        den = std::make_unique<bm4d::IdentityDenoiser>();
    else if (args.denoiser == "contract")
        den = std::make_unique<bm4d::ContractDenoiser>(args.contract_factor);
    else if (args.denoiser == "coupled")
        den = std::make_unique<bm4d::SegmentMeanDenoiser>(args.pull);
    else
        throw bm4d::ConfigError("unknown denoiser: " + args.denoiser);

    // Synthetic circular rig for the camera embeddings; the demo has no real
    // cameras, only their conditioning role.
    std::vector<bm4d::CameraRig> rigs;
    for (int v = 0; v < args.views; ++v) {
        const double theta = 2.0 * M_PI * v / args.views;
        const bm4d::Vec3 target(0, 0.9, 0);
        const bm4d::Vec3 pos = target + 2.7 * bm4d::Vec3(std::sin(theta), 0.0, std::cos(theta));
        rigs.push_back(bm4d::make_look_at_rig(pos, target, bm4d::Vec3(0, 1, 0), 500, 500, 576, 576));
    }
    const bm4d::ConditioningBundle cond =
        bm4d::make_conditioning(rigs, args.frames, bm4d::EmbeddingConfig{});

    bm4d::LatentShape shape{args.channels, args.latent_h, args.latent_w};
    const bm4d::LatentGrid noise =
        bm4d::make_noise_grid(args.frames, args.views, shape, args.steps, args.seed);

    std::string csv = "step,temporal_seam,view_seam\n";
    int step_index = 0;
    const bm4d::LatentGrid z0 = bm4d::sample(
        noise, args.steps, plan, *den, cond, args.branch_mix,
        [&](const bm4d::LatentGrid& g) {
            const bm4d::SeamMetrics m = bm4d::seam_discontinuity(g, args.cyclic_views);
            csv += std::to_string(step_index++) + "," + std::to_string(m.temporal_max) + "," +
                   std::to_string(m.view_max) + "\n";
        });

    bm4d::write_latent_grid(args.out, z0);
    const std::string metrics_path = args.metrics.empty() ? args.out + ".seams.csv" : args.metrics;
    bm4d::write_file_atomic(metrics_path, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bone-map conditioning and spatio-temporal sampling toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "render depth/normal bone maps");
    render->add_option("--poses", render_args.poses, "skeleton animation JSON")->required();
    render->add_option("--topology", render_args.topology, "bone topology JSON (default: built-in)");
    render->add_option("--cameras", render_args.cameras, "camera rig JSON")->required();
    render->add_option("--out", render_args.out, "output directory")->required();
    render->add_option("--size", render_args.size, "override square image size");
    render->add_option("--depth-mode", render_args.depth_mode, "euclidean | z")
        ->check(CLI::IsMember({"euclidean", "z"}));
    render->add_flag("--print-config", render_args.print_config, "dump effective config as JSON");

    AlignArgs align_args;
    auto* align = app.add_subcommand("align", "compute pelvis-centering shifts");
    align->add_option("--poses", align_args.poses)->required();
    align->add_option("--cameras", align_args.cameras)->required();
    align->add_option("--target", align_args.target, "target pixel u,v")->expected(2)->delimiter(',');
    align->add_option("--ref-pelvis", align_args.ref_pelvis,
                      "reference-image pelvis u,v for temporal alignment")
        ->expected(2)
        ->delimiter(',');
    align->add_option("--out", align_args.out, "transforms JSON path")->required();
    align->add_flag("--print-config", align_args.print_config);

    InspectArgs inspect_args;
    auto* inspect = app.add_subcommand("inspect", "dump internal structures as JSON");
    inspect->require_subcommand(1);
    auto* ell = inspect->add_subcommand("ellipsoids", "per-bone ellipsoids for one frame");
    ell->add_option("--poses", inspect_args.poses)->required();
    ell->add_option("--topology", inspect_args.topology);
    ell->add_option("--frame", inspect_args.frame);
    ell->add_option("--out", inspect_args.out, "output file (default: stdout)");
    ell->add_flag("--print-config", inspect_args.print_config);
    auto* emb = inspect->add_subcommand("embeddings", "camera/frame sinusoidal embeddings");
    emb->add_option("--cameras", inspect_args.cameras);
    emb->add_option("--frames", inspect_args.frames, "number of frame-index embeddings");
    emb->add_option("--dim", inspect_args.dim);
    emb->add_option("--max-period", inspect_args.max_period);
    emb->add_option("--out", inspect_args.out, "output file (default: stdout)");
    emb->add_flag("--print-config", inspect_args.print_config);

    SampleArgs sample_args;
    auto* demo = app.add_subcommand("sample-demo", "progressive sampling with a toy denoiser");
    demo->add_option("--frames", sample_args.frames);
    demo->add_option("--views", sample_args.views);
    demo->add_option("--t-long", sample_args.window.t_long);
    demo->add_option("--t-ol", sample_args.window.t_ol);
    demo->add_option("--t-short", sample_args.window.t_short);
    demo->add_option("--n-long", sample_args.window.n_long);
    demo->add_option("--n-ol", sample_args.window.n_ol);
    demo->add_option("--n-short", sample_args.window.n_short);
    demo->add_flag("--cyclic-views,!--no-cyclic-views", sample_args.cyclic_views,
                   "view axis wraps across the 360-degree seam");
    demo->add_option("--steps", sample_args.steps);
    demo->add_option("--denoiser", sample_args.denoiser)
        ->check(CLI::IsMember({"identity", "contract", "coupled"}));
    demo->add_option("--contract-factor", sample_args.contract_factor);
    demo->add_option("--pull", sample_args.pull, "segment-mean pull of the coupled denoiser");
    demo->add_option("--branch-mix", sample_args.branch_mix);
    demo->add_option("--seed", sample_args.seed);
    demo->add_option("--channels", sample_args.channels);
    demo->add_option("--latent-h", sample_args.latent_h);
    demo->add_option("--latent-w", sample_args.latent_w);
    demo->add_option("--out", sample_args.out, "latent grid output")->required();
    demo->add_option("--metrics", sample_args.metrics, "seam metrics CSV (default: <out>.seams.csv)");
    demo->add_flag("--print-config", sample_args.print_config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: usage: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (render->parsed()) return run_render(render_args);
        if (align->parsed()) return run_align(align_args);
        if (inspect->parsed()) {
            if (inspect->get_subcommand("ellipsoids")->parsed())
                return run_inspect_ellipsoids(inspect_args);
            return run_inspect_embeddings(inspect_args);
        }
        if (demo->parsed()) return run_sample_demo(sample_args);
        std::cerr << "error: usage: no subcommand\n";
        return kExitUsage;
    } catch (const bm4d::ConfigError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const bm4d::IoError& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return kExitIo;
    } catch (const bm4d::ParseError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const bm4d::SchemaError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const bm4d::ValueError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        // DegenerateInput / DegenerateBone / BehindCamera / OutOfFrame /
        // EmptyInput / ShapeError: numeric-domain failures.
        std::cerr << "error: numeric: " << e.what() << "\n";
        return kExitNumeric;
    }
}
