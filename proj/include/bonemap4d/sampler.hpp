#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bonemap4d/camera.hpp"
#include "bonemap4d/embeddings.hpp"
#include "bonemap4d/errors.hpp"
#include "bonemap4d/parallel.hpp"
#include "bonemap4d/renderer.hpp"

namespace bm4d {

struct LatentShape {
    int channels = 4;
    int height = 8;
    int width = 8;
    std::size_t cell_size() const {
        return static_cast<std::size_t>(channels) * height * width;
    }
};

/// frames x views grid of latent tensors plus the current diffusion timestep
/// (counts down to 0).
struct LatentGrid {
    int frames = 0;
    int views = 0;
    LatentShape shape;
    int timestep = 0;
    std::vector<std::vector<double>> cells;  // frame-major: cells[t*views + v]

    static LatentGrid zeros(int frames, int views, LatentShape shape, int timestep) {
        LatentGrid g;
        g.frames = frames;
        g.views = views;
        g.shape = shape;
        g.timestep = timestep;
        g.cells.assign(static_cast<std::size_t>(frames) * views,
                       std::vector<double>(shape.cell_size(), 0.0));
        return g;
    }

    std::vector<double>& cell(int t, int v) { return cells[static_cast<std::size_t>(t) * views + v]; }
    const std::vector<double>& cell(int t, int v) const {
        return cells[static_cast<std::size_t>(t) * views + v];
    }

    void validate() const {
        if (frames <= 0 || views <= 0) throw ShapeError("latent grid must be non-empty");
        if (timestep < 0) throw ValueError("timestep must be non-negative");
        if (cells.size() != static_cast<std::size_t>(frames) * views)
            throw ShapeError("latent grid cell count mismatch");
        for (const auto& c : cells) {
            if (c.size() != shape.cell_size()) throw ShapeError("latent cell shape mismatch");
            for (double x : c)
                if (!std::isfinite(x)) throw ValueError("latent grid contains a non-finite value");
        }
    }
};

/// Seeded standard-normal noise grid. Uses an explicit Box-Muller transform
/// over mt19937_64 draws so outputs are stable across standard libraries.
inline LatentGrid make_noise_grid(int frames, int views, LatentShape shape, int timestep,
                                  std::uint64_t seed) {
    LatentGrid g = LatentGrid::zeros(frames, views, shape, timestep);
    std::mt19937_64 rng(seed);
    const double two_pi = 6.283185307179586476925286766559;
    auto uniform01 = [&rng] {
        return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    };
    for (auto& cell : g.cells)
        for (auto& x : cell)
            x = std::sqrt(-2.0 * std::log(uniform01())) * std::cos(two_pi * uniform01());
    return g;
}

/// Long/short extents and overlaps of the two sampling branches.
struct WindowConfig {
    int t_long = 16;
    int t_ol = 8;
    int t_short = 8;
    int n_long = 6;
    int n_ol = 2;
    int n_short = 3;

    void validate() const {
        if (t_long < 1 || n_long < 1 || t_short < 1 || n_short < 1)
            throw ConfigError("window lengths must be positive");
        if (t_ol < 0 || n_ol < 0) throw ConfigError("overlaps must be non-negative");
        if (t_ol >= t_long) throw ConfigError("temporal overlap must be smaller than the window");
        if (n_ol >= n_long) throw ConfigError("view overlap must be smaller than the window");
    }
};

/// Raw per-window fusion profile: interior weight 1; within an overlap of
/// length L the weight ramps linearly from 1/(L+1) at the outermost cell to
/// L/(L+1) at the innermost, so two adjacent windows sum to 1 on every shared
/// cell.
inline std::vector<double> ramp_weights(int window_len, int overlap_left, int overlap_right) {
    if (window_len <= 0) throw ConfigError("window length must be positive");
    if (overlap_left < 0 || overlap_right < 0) throw ConfigError("overlaps must be non-negative");
    if (overlap_left + overlap_right > window_len)
        throw ConfigError("overlaps exceed the window length");
    std::vector<double> w(static_cast<std::size_t>(window_len), 1.0);
    for (int i = 0; i < overlap_left; ++i)
        w[i] = static_cast<double>(i + 1) / (overlap_left + 1);
    for (int i = 0; i < overlap_right; ++i)
        w[window_len - 1 - i] = static_cast<double>(i + 1) / (overlap_right + 1);
    return w;
}

/// One axis range of a segment. `weights[i]` applies to global index
/// (begin + i) mod axis_size; wraps is set for view windows crossing the
/// 360-degree seam.
struct AxisWindow {
    int begin = 0;
    int len = 0;
    bool wraps = false;
    std::vector<double> weights;

    int global_index(int i, int axis_size) const { return (begin + i) % axis_size; }
};

struct GridSegment {
    AxisWindow frames;
    AxisWindow views;
};

struct WindowPlan {
    int frame_count = 0;
    int view_count = 0;
    bool cyclic_views = false;
    std::vector<GridSegment> temporal_segments;
    std::vector<GridSegment> view_segments;
};

namespace detail {

struct AxisSpan {
    int begin = 0;
    int len = 0;
    bool wraps = false;
    int left_overlap = 0;
    int right_overlap = 0;
};

// Overlapping windows along one axis. Non-cyclic axes anchor the final
// window at the end, which can only increase its overlap with the previous
// window; cyclic axes wrap the final window across the seam the same way.
inline std::vector<AxisSpan> plan_axis_windows(int n, int window, int overlap, bool cyclic) {
    const int len = std::min(window, n);
    if (len == n) return {AxisSpan{0, n, false, 0, 0}};

    const int stride = window - overlap;
    std::vector<AxisSpan> spans;
    if (!cyclic) {
        for (int s = 0; s + window <= n; s += stride) spans.push_back({s, window, false, 0, 0});
        if (spans.back().begin + window < n) spans.push_back({n - window, window, false, 0, 0});
        for (std::size_t i = 0; i + 1 < spans.size(); ++i) {
            const int o = spans[i].begin + window - spans[i + 1].begin;
            spans[i].right_overlap = o;
            spans[i + 1].left_overlap = o;
        }
    } else {
        const int count = (n + stride - 1) / stride;
        for (int i = 0; i < count; ++i)
            spans.push_back({i * stride, window, i * stride + window > n, 0, 0});
        for (int i = 0; i < count; ++i) {
            const int next = (i + 1) % count;
            const int o = spans[i].begin + window - (spans[next].begin + (next == 0 ? n : 0));
            spans[i].right_overlap = o;
            spans[next].left_overlap = o;
        }
    }
    return spans;
}

// Exact non-overlapping tiling (the short axis of each branch).
inline std::vector<AxisSpan> plan_axis_tiles(int n, int tile) {
    std::vector<AxisSpan> spans;
    for (int s = 0; s < n; s += tile) spans.push_back({s, std::min(tile, n - s), false, 0, 0});
    return spans;
}

// Raw ramp profiles, then a per-cell renormalization across the axis. In the
// regular two-deep overlap pattern the raw sums are already 1 and the
// division is a no-op; anchored windows (larger final overlap) get their
// ramps recomputed here so the partition of unity holds exactly.
inline std::vector<AxisWindow> weighted_axis_windows(std::vector<AxisSpan> spans, int n) {
    std::vector<AxisWindow> windows;
    windows.reserve(spans.size());
    for (const auto& s : spans) {
        const int left = std::min(s.left_overlap, s.len);
        const int right = std::min(s.right_overlap, s.len - left);
        windows.push_back({s.begin, s.len, s.wraps, ramp_weights(s.len, left, right)});
    }
    std::vector<double> total(static_cast<std::size_t>(n), 0.0);
    for (const auto& w : windows)
        for (int i = 0; i < w.len; ++i) total[w.global_index(i, n)] += w.weights[i];
    for (auto& w : windows)
        for (int i = 0; i < w.len; ++i) w.weights[i] /= total[w.global_index(i, n)];
    return windows;
}

inline std::vector<AxisWindow> ones_axis_windows(const std::vector<AxisSpan>& spans) {
    std::vector<AxisWindow> windows;
    windows.reserve(spans.size());
    for (const auto& s : spans)
        windows.push_back({s.begin, s.len, s.wraps,
                           std::vector<double>(static_cast<std::size_t>(s.len), 1.0)});
    return windows;
}

}  // namespace detail

/// Partitions the frames x views grid into the two overlapping segment sets:
/// temporal segments (long frame windows x short view tiles) and view
/// segments (long view windows x short frame tiles). View windows wrap across
/// the 360-degree seam when cyclic_views is set.
inline WindowPlan plan_windows(int frame_count, int view_count, const WindowConfig& cfg,
                               bool cyclic_views) {
    cfg.validate();
    if (frame_count < 1 || view_count < 1) throw ConfigError("grid must be non-empty");

    WindowPlan plan;
    plan.frame_count = frame_count;
    plan.view_count = view_count;
    plan.cyclic_views = cyclic_views;

    const auto frame_windows = detail::weighted_axis_windows(
        detail::plan_axis_windows(frame_count, cfg.t_long, cfg.t_ol, false), frame_count);
    const auto view_tiles =
        detail::ones_axis_windows(detail::plan_axis_tiles(view_count, cfg.n_short));
    for (const auto& fw : frame_windows)
        for (const auto& vt : view_tiles) plan.temporal_segments.push_back({fw, vt});

    const auto view_windows = detail::weighted_axis_windows(
        detail::plan_axis_windows(view_count, cfg.n_long, cfg.n_ol, cyclic_views), view_count);
    const auto frame_tiles =
        detail::ones_axis_windows(detail::plan_axis_tiles(frame_count, cfg.t_short));
    for (const auto& ft : frame_tiles)
        for (const auto& vw : view_windows) plan.view_segments.push_back({ft, vw});

    return plan;
}

/// Conditioning handed to the denoiser: per-view camera embeddings, per-frame
/// index embeddings, optional bone maps, and a reference-image descriptor.
struct ConditioningBundle {
    std::vector<std::vector<double>> camera_embeddings;
    std::vector<std::vector<double>> frame_embeddings;
    const BoneMapGrid* bone_maps = nullptr;
    std::vector<double> reference_descriptor;
};

inline ConditioningBundle make_conditioning(
    const std::vector<CameraRig>& rigs, int frame_count, const EmbeddingConfig& cfg,
    const EmbeddingTransform& camera_transform = identity_embedding_transform()) {
    ConditioningBundle cond;
    for (const auto& rel : relative_rotation(rigs))
        cond.camera_embeddings.push_back(camera_transform(embed_camera(rel, cfg).values));
    for (int t = 0; t < frame_count; ++t)
        cond.frame_embeddings.push_back(embed_frame_index(t, cfg));
    return cond;
}

/// Sub-grid handed to a denoiser: cells in frame-major order plus the global
/// frame/view indices they came from.
struct LatentPatch {
    std::vector<int> frame_indices;
    std::vector<int> view_indices;
    LatentShape shape;
    int timestep = 0;
    std::vector<std::vector<double>> cells;  // cells[fi * view_indices.size() + vi]

    const std::vector<double>& cell(int fi, int vi) const {
        return cells[static_cast<std::size_t>(fi) * view_indices.size() + vi];
    }
};

/// Seam behind which the trained denoising network would sit. Implementations
/// must return one output cell per input cell with identical shapes, and must
/// be deterministic for fixed inputs. concurrent_safe() denoisers may be
/// invoked from several workers at once.
class DenoiserInterface {
  public:
    virtual ~DenoiserInterface() = default;
    virtual std::vector<std::vector<double>> denoise(const LatentPatch& patch,
                                                     const ConditioningBundle& cond) = 0;
    virtual bool concurrent_safe() const { return true; }
};

struct IdentityDenoiser final : DenoiserInterface {
    std::vector<std::vector<double>> denoise(const LatentPatch& patch,
                                             const ConditioningBundle&) override {
        return patch.cells;
    }
};

/// Cell-local geometric contraction z -> factor * z.
struct ContractDenoiser final : DenoiserInterface {
    explicit ContractDenoiser(double factor = 0.9) : factor(factor) {}
    double factor;

    std::vector<std::vector<double>> denoise(const LatentPatch& patch,
                                             const ConditioningBundle&) override {
        auto out = patch.cells;
        for (auto& cell : out)
            for (auto& x : cell) x *= factor;
        return out;
    }
};

/// Coupled toy: pulls every cell toward the element-wise mean of its segment,
/// so independent segments drift apart and seams appear without fusion.
struct SegmentMeanDenoiser final : DenoiserInterface {
    explicit SegmentMeanDenoiser(double pull = 0.5) : pull(pull) {}
    double pull;

    std::vector<std::vector<double>> denoise(const LatentPatch& patch,
                                             const ConditioningBundle&) override {
        const std::size_t cell_size = patch.shape.cell_size();
        std::vector<double> mean(cell_size, 0.0);
        for (const auto& cell : patch.cells)
            for (std::size_t i = 0; i < cell_size; ++i) mean[i] += cell[i];
        for (auto& m : mean) m /= static_cast<double>(patch.cells.size());
        auto out = patch.cells;
        for (auto& cell : out)
            for (std::size_t i = 0; i < cell_size; ++i)
                cell[i] += pull * (mean[i] - cell[i]);
        return out;
    }
};

namespace detail {

inline LatentPatch extract_patch(const LatentGrid& grid, const GridSegment& seg) {
    LatentPatch patch;
    patch.shape = grid.shape;
    patch.timestep = grid.timestep;
    for (int i = 0; i < seg.frames.len; ++i)
        patch.frame_indices.push_back(seg.frames.global_index(i, grid.frames));
    for (int j = 0; j < seg.views.len; ++j)
        patch.view_indices.push_back(seg.views.global_index(j, grid.views));
    patch.cells.reserve(patch.frame_indices.size() * patch.view_indices.size());
    for (int t : patch.frame_indices)
        for (int v : patch.view_indices) patch.cells.push_back(grid.cell(t, v));
    return patch;
}

// Denoises every segment of one branch and blends the results with the
// plan's fusion weights. Segments may be denoised concurrently; accumulation
// runs in segment order so the reduction is deterministic.
inline std::vector<std::vector<double>> fuse_branch(const LatentGrid& grid,
                                                    const std::vector<GridSegment>& segments,
                                                    DenoiserInterface& den,
                                                    const ConditioningBundle& cond,
                                                    unsigned threads) {
    std::vector<std::vector<std::vector<double>>> results(segments.size());
    auto run_segment = [&](std::size_t si) {
        const LatentPatch patch = extract_patch(grid, segments[si]);
        auto out = den.denoise(patch, cond);
        if (out.size() != patch.cells.size()) throw ShapeError("denoiser changed the cell count");
        for (const auto& cell : out)
            if (cell.size() != grid.shape.cell_size())
                throw ShapeError("denoiser changed the cell shape");
        results[si] = std::move(out);
    };
    if (den.concurrent_safe())
        parallel_for(segments.size(), run_segment, threads);
    else
        for (std::size_t si = 0; si < segments.size(); ++si) run_segment(si);

    std::vector<std::vector<double>> fused(grid.cells.size(),
                                           std::vector<double>(grid.shape.cell_size(), 0.0));
    for (std::size_t si = 0; si < segments.size(); ++si) {
        const auto& seg = segments[si];
        for (int fi = 0; fi < seg.frames.len; ++fi) {
            const int t = seg.frames.global_index(fi, grid.frames);
            for (int vi = 0; vi < seg.views.len; ++vi) {
                const int v = seg.views.global_index(vi, grid.views);
                const double w = seg.frames.weights[fi] * seg.views.weights[vi];
                auto& dst = fused[static_cast<std::size_t>(t) * grid.views + v];
                const auto& src = results[si][static_cast<std::size_t>(fi) * seg.views.len + vi];
                for (std::size_t e = 0; e < dst.size(); ++e) dst[e] += w * src[e];
            }
        }
    }
    return fused;
}

}  // namespace detail

/// One sampling step: denoise all temporal segments into z_ST and all view
/// segments into z_SV, then combine branch_mix * z_ST + (1-branch_mix) * z_SV
/// and decrement the timestep.
inline LatentGrid denoise_step(const LatentGrid& grid, const WindowPlan& plan,
                               DenoiserInterface& den, const ConditioningBundle& cond,
                               double branch_mix, unsigned threads = 0) {
    if (grid.timestep < 1) throw ConfigError("denoise_step requires timestep >= 1");
    if (plan.frame_count != grid.frames || plan.view_count != grid.views)
        throw ShapeError("window plan does not match the latent grid");
    if (!(branch_mix >= 0.0 && branch_mix <= 1.0))
        throw ConfigError("branch_mix must lie in [0, 1]");

    const auto z_st = detail::fuse_branch(grid, plan.temporal_segments, den, cond, threads);
    const auto z_sv = detail::fuse_branch(grid, plan.view_segments, den, cond, threads);

    LatentGrid next = grid;
    next.timestep = grid.timestep - 1;
    for (std::size_t i = 0; i < next.cells.size(); ++i)
        for (std::size_t e = 0; e < next.cells[i].size(); ++e)
            next.cells[i][e] = branch_mix * z_st[i][e] + (1.0 - branch_mix) * z_sv[i][e];
    return next;
}

/// Runs denoise_step exactly `steps` times, reaching timestep 0.
inline LatentGrid sample(const LatentGrid& initial_noise, int steps, const WindowPlan& plan,
                         DenoiserInterface& den, const ConditioningBundle& cond,
                         double branch_mix = 0.5,
                         const std::function<void(const LatentGrid&)>& on_step = nullptr,
                         unsigned threads = 0) {
    if (steps < 1) throw ConfigError("steps must be at least 1");
    if (initial_noise.timestep != steps)
        throw ConfigError("initial noise timestep must equal the step count");
    LatentGrid grid = initial_noise;
    for (int s = 0; s < steps; ++s) {
        grid = denoise_step(grid, plan, den, cond, branch_mix, threads);
        if (on_step) on_step(grid);
    }
    return grid;
}

/// Largest jump between adjacent cells (mean absolute element difference),
/// reported separately for the frame and view axes. The view axis wraps when
/// cyclic is set.
struct SeamMetrics {
    double temporal_max = 0.0;
    double view_max = 0.0;
    double overall() const { return std::max(temporal_max, view_max); }
};

inline SeamMetrics seam_discontinuity(const LatentGrid& grid, bool cyclic_views) {
    SeamMetrics m;
    const std::size_t cell_size = grid.shape.cell_size();
    auto mean_abs_diff = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double sum = 0.0;
        for (std::size_t e = 0; e < cell_size; ++e) sum += std::abs(a[e] - b[e]);
        return sum / static_cast<double>(cell_size);
    };
    for (int t = 0; t + 1 < grid.frames; ++t)
        for (int v = 0; v < grid.views; ++v)
            m.temporal_max = std::max(m.temporal_max, mean_abs_diff(grid.cell(t, v), grid.cell(t + 1, v)));
    const int view_pairs = cyclic_views ? grid.views : grid.views - 1;
    for (int t = 0; t < grid.frames; ++t)
        for (int v = 0; v < view_pairs; ++v)
            m.view_max = std::max(
                m.view_max, mean_abs_diff(grid.cell(t, v), grid.cell(t, (v + 1) % grid.views)));
    return m;
}

}  // namespace bm4d
