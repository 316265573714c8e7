#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "bonemap4d/camera.hpp"
#include "bonemap4d/ellipsoid.hpp"
#include "bonemap4d/errors.hpp"
#include "bonemap4d/math.hpp"
#include "bonemap4d/parallel.hpp"
#include "bonemap4d/skeleton.hpp"

namespace bm4d {

/// Dual-dimensional bone map for one (frame, view): a depth image in meters
/// and a camera-space normal image, plus the coverage mask. Background pixels
/// carry depth 0 and a zero normal.
struct BoneMap {
    int width = 0;
    int height = 0;
    std::vector<float> depth;        // height*width
    std::vector<float> normal;       // height*width*3, camera space
    std::vector<std::uint8_t> coverage;

    BoneMap() = default;
    BoneMap(int w, int h)
        : width(w), height(h), depth(static_cast<std::size_t>(w) * h, 0.0f),
          normal(static_cast<std::size_t>(w) * h * 3, 0.0f),
          coverage(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool covered(int x, int y) const { return coverage[index(x, y)] != 0; }
    float depth_at(int x, int y) const { return depth[index(x, y)]; }
    Vec3 normal_at(int x, int y) const {
        const std::size_t i = index(x, y) * 3;
        return Vec3(normal[i], normal[i + 1], normal[i + 2]);
    }

    void validate() const {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                if (covered(x, y)) {
                    if (!(depth_at(x, y) > 0.0f))
                        throw ValueError("covered pixel with non-positive depth");
                    if (std::abs(normal_at(x, y).norm() - 1.0) >= 1e-5)
                        throw ValueError("covered pixel with non-unit normal");
                } else {
                    if (depth_at(x, y) != 0.0f || normal_at(x, y) != Vec3::Zero())
                        throw ValueError("background pixel with stale data");
                }
            }
        }
    }
};

struct RayHit {
    double t = 0.0;       // meters along the unit ray
    Vec3 normal_world = Vec3::Zero();
};

/// Nearest intersection of the ray origin + t*dir (dir unit) with the
/// ellipsoid, t > 1e-6. The ray is mapped into the frame where the ellipsoid
/// is the unit sphere; the returned normal is the normalized world-space
/// gradient of the implicit surface function.
inline std::optional<RayHit> ray_ellipsoid_hit(const Vec3& origin, const Vec3& dir,
                                               const BoneEllipsoid& e) {
    const Vec3 inv_r = e.radii.cwiseInverse();
    const Mat3 rt = e.rotation.transpose();
    const Vec3 o = inv_r.cwiseProduct(rt * (origin - e.center));
    const Vec3 d = inv_r.cwiseProduct(rt * dir);

    const double a = d.squaredNorm();
    const double b = o.dot(d);
    const double c = o.squaredNorm() - 1.0;
    const double disc = b * b - a * c;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    double t = (-b - sq) / a;
    if (t <= 1e-6) t = (-b + sq) / a;
    if (t <= 1e-6) return std::nullopt;

    const Vec3 q = o + t * d;  // point on the unit sphere
    RayHit hit;
    hit.t = t;
    hit.normal_world = (e.rotation * q.cwiseProduct(inv_r)).normalized();
    return hit;
}

struct RenderOptions {
    DepthMode depth_mode = DepthMode::kEuclidean;
    unsigned threads = 0;  // 0 = auto (BONEMAP4D_THREADS / hardware)
};

namespace detail {

struct PixelRect {
    int x0 = 0, x1 = -1, y0 = 0, y1 = -1;  // inclusive; empty when x1 < x0
    bool empty() const { return x1 < x0 || y1 < y0; }
};

// Conservative screen-space rect for an ellipsoid: project the corners of its
// world-space AABB. Falls back to the full image when the camera is inside
// the box or a corner reaches the near plane.
inline PixelRect ellipsoid_pixel_rect(const BoneEllipsoid& e, const CameraRig& rig) {
    const PixelRect full{0, rig.width - 1, 0, rig.height - 1};
    Vec3 half;
    for (int i = 0; i < 3; ++i)
        half[i] = (e.rotation.row(i).transpose().cwiseProduct(e.radii)).norm();

    const Vec3 cam = rig.camera_center();
    if ((cam - e.center).cwiseAbs().cwiseQuotient(half).maxCoeff() <= 1.0) return full;

    double min_u = std::numeric_limits<double>::infinity(), max_u = -min_u;
    double min_v = min_u, max_v = max_u;
    for (int corner = 0; corner < 8; ++corner) {
        const Vec3 p = e.center + Vec3((corner & 1) ? half.x() : -half.x(),
                                       (corner & 2) ? half.y() : -half.y(),
                                       (corner & 4) ? half.z() : -half.z());
        const Vec3 p_cam = rig.rotation_wc * p + rig.translation_wc;
        if (p_cam.z() <= 1e-4) return full;
        const double u = rig.fx * p_cam.x() / p_cam.z() + rig.cx;
        const double v = rig.fy * p_cam.y() / p_cam.z() + rig.cy;
        min_u = std::min(min_u, u);
        max_u = std::max(max_u, u);
        min_v = std::min(min_v, v);
        max_v = std::max(max_v, v);
    }
    PixelRect rect;
    rect.x0 = std::max(0, static_cast<int>(std::floor(min_u)) - 1);
    rect.x1 = std::min(rig.width - 1, static_cast<int>(std::ceil(max_u)) + 1);
    rect.y0 = std::max(0, static_cast<int>(std::floor(min_v)) - 1);
    rect.y1 = std::min(rig.height - 1, static_cast<int>(std::ceil(max_v)) + 1);
    return rect;
}

}  // namespace detail

/// Renders the bone map by casting one pinhole ray per pixel (through the
/// integer pixel coordinate) and keeping the nearest hit over all ellipsoids.
/// Deterministic: per-pixel results do not depend on the worker count.
inline BoneMap render_bone_map(const std::vector<BoneEllipsoid>& ellipsoids, const CameraRig& rig,
                               const RenderOptions& opts = {}) {
    rig.validate();
    const int w = rig.width;
    const int h = rig.height;
    BoneMap map(w, h);
    const std::size_t n = static_cast<std::size_t>(w) * h;

    const Vec3 cam = rig.camera_center();
    const Mat3 cam_to_world = rig.rotation_wc.transpose();

    // Unit world-space ray directions, and the camera-space z of each unit
    // direction (depth_z = t * unit_dir_cam.z at the hit).
    std::vector<double> dirs(n * 3);
    std::vector<double> dir_cam_z(n);
    parallel_for(
        static_cast<std::size_t>(h),
        [&](std::size_t y) {
            for (int x = 0; x < w; ++x) {
                const Vec3 dir_cam(( x - rig.cx) / rig.fx, (static_cast<double>(y) - rig.cy) / rig.fy, 1.0);
                const Vec3 unit_cam = dir_cam.normalized();
                const Vec3 dir_world = cam_to_world * unit_cam;
                const std::size_t i = y * w + x;
                dirs[i * 3 + 0] = dir_world.x();
                dirs[i * 3 + 1] = dir_world.y();
                dirs[i * 3 + 2] = dir_world.z();
                dir_cam_z[i] = unit_cam.z();
            }
        },
        opts.threads);

    std::vector<detail::PixelRect> rects(ellipsoids.size());
    for (std::size_t i = 0; i < ellipsoids.size(); ++i)
        rects[i] = detail::ellipsoid_pixel_rect(ellipsoids[i], rig);

    std::vector<double> best_t(n, std::numeric_limits<double>::infinity());
    std::vector<double> best_n(n * 3, 0.0);

    parallel_for(
        static_cast<std::size_t>(h),
        [&](std::size_t y) {
            const int yi = static_cast<int>(y);
            for (std::size_t ei = 0; ei < ellipsoids.size(); ++ei) {
                const auto& rect = rects[ei];
                if (rect.empty() || yi < rect.y0 || yi > rect.y1) continue;
                const auto& e = ellipsoids[ei];
                const Vec3 inv_r = e.radii.cwiseInverse();
                const Mat3 sphere_from_world = inv_r.asDiagonal() * e.rotation.transpose();
                const Vec3 o = sphere_from_world * (cam - e.center);
                const double c = o.squaredNorm() - 1.0;
                for (int x = rect.x0; x <= rect.x1; ++x) {
                    const std::size_t i = y * w + x;
                    const Vec3 dir(dirs[i * 3], dirs[i * 3 + 1], dirs[i * 3 + 2]);
                    const Vec3 d = sphere_from_world * dir;
                    const double a = d.squaredNorm();
                    const double b = o.dot(d);
                    const double disc = b * b - a * c;
                    if (disc < 0.0) continue;
                    const double sq = std::sqrt(disc);
                    double t = (-b - sq) / a;
                    if (t <= 1e-6) t = (-b + sq) / a;
                    if (t <= 1e-6 || t >= best_t[i]) continue;
                    best_t[i] = t;
                    const Vec3 q = o + t * d;
                    const Vec3 n_world = (e.rotation * q.cwiseProduct(inv_r)).normalized();
                    best_n[i * 3 + 0] = n_world.x();
                    best_n[i * 3 + 1] = n_world.y();
                    best_n[i * 3 + 2] = n_world.z();
                }
            }
        },
        opts.threads);

    parallel_for(
        static_cast<std::size_t>(h),
        [&](std::size_t y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = y * w + x;
                if (!std::isfinite(best_t[i])) continue;
                map.coverage[i] = 1;
                const double depth =
                    (opts.depth_mode == DepthMode::kEuclidean) ? best_t[i] : best_t[i] * dir_cam_z[i];
                map.depth[i] = static_cast<float>(depth);
                const Vec3 n_world(best_n[i * 3], best_n[i * 3 + 1], best_n[i * 3 + 2]);
                const Vec3 n_cam = rig.rotation_wc * n_world;
                map.normal[i * 3 + 0] = static_cast<float>(n_cam.x());
                map.normal[i * 3 + 1] = static_cast<float>(n_cam.y());
                map.normal[i * 3 + 2] = static_cast<float>(n_cam.z());
            }
        },
        opts.threads);

    return map;
}

using BoneMapGrid = std::vector<std::vector<BoneMap>>;  // [frame][view]

/// Renders every (frame, view) cell. Cells are independent; the cell loop is
/// parallel when there are at least as many cells as workers, otherwise each
/// map renders with internal row parallelism.
inline BoneMapGrid render_sequence(const PoseSequence& poses, const BoneTopology& topo,
                                   const std::vector<CameraRig>& rigs,
                                   const RenderOptions& opts = {}) {
    poses.validate();
    topo.validate();
    if (rigs.empty()) throw EmptyInput("render_sequence needs at least one camera");

    std::vector<std::vector<BoneEllipsoid>> per_frame;
    per_frame.reserve(poses.frames.size());
    for (const auto& frame : poses.frames)
        per_frame.push_back(build_skeleton_ellipsoids(frame, topo));

    const std::size_t frames = poses.frames.size();
    const std::size_t views = rigs.size();
    BoneMapGrid grid(frames, std::vector<BoneMap>(views));

    const std::size_t cells = frames * views;
    const unsigned workers = resolve_thread_count(opts.threads);
    if (cells >= workers && workers > 1) {
        RenderOptions cell_opts = opts;
        cell_opts.threads = 1;
        parallel_for(
            cells,
            [&](std::size_t i) {
                grid[i / views][i % views] = render_bone_map(per_frame[i / views], rigs[i % views], cell_opts);
            },
            opts.threads);
    } else {
        for (std::size_t t = 0; t < frames; ++t)
            for (std::size_t v = 0; v < views; ++v)
                grid[t][v] = render_bone_map(per_frame[t], rigs[v], opts);
    }
    return grid;
}

}  // namespace bm4d
