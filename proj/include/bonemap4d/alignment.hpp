#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "bonemap4d/camera.hpp"
#include "bonemap4d/errors.hpp"
#include "bonemap4d/renderer.hpp"
#include "bonemap4d/skeleton.hpp"

namespace bm4d {

/// Integer-pixel shift that moves the projected pelvis onto `target`.
/// Integer shifts keep depth/normal values exact; no resampling happens.
struct AlignmentTransform {
    int dx = 0;
    int dy = 0;
    double target_u = 0.0;
    double target_v = 0.0;
};

/// Shift landing the pelvis projection within 0.5 px of the target.
inline AlignmentTransform compute_view_alignment(const JointSet& pose, const CameraRig& rig,
                                                 double target_u, double target_v) {
    const Projection p = project(rig, pose.pelvis());
    AlignmentTransform xf;
    xf.dx = static_cast<int>(std::lround(target_u - p.u));
    xf.dy = static_cast<int>(std::lround(target_v - p.v));
    xf.target_u = target_u;
    xf.target_v = target_v;
    if (std::abs(xf.dx) >= rig.width || std::abs(xf.dy) >= rig.height)
        throw OutOfFrame("alignment shift exceeds the image size");
    return xf;
}

/// Shift moving the reference image's pelvis pixel onto the projected pelvis
/// of the first pose frame.
inline AlignmentTransform compute_temporal_alignment(double reference_pelvis_u,
                                                     double reference_pelvis_v,
                                                     const JointSet& first_frame_pose,
                                                     const CameraRig& rig) {
    const Projection p = project(rig, first_frame_pose.pelvis());
    AlignmentTransform xf;
    xf.dx = static_cast<int>(std::lround(p.u - reference_pelvis_u));
    xf.dy = static_cast<int>(std::lround(p.v - reference_pelvis_v));
    xf.target_u = p.u;
    xf.target_v = p.v;
    return xf;
}

/// Integer-pixel translate of any interleaved H x W grid; vacated cells get
/// the background value. Shifts larger than the image clamp to an all
/// background grid.
template <typename T>
std::vector<T> shift_grid(const std::vector<T>& data, int width, int height, int channels, int dx,
                          int dy, T background = T{}) {
    std::vector<T> out(data.size(), background);
    for (int y = 0; y < height; ++y) {
        const int sy = y - dy;
        if (sy < 0 || sy >= height) continue;
        for (int x = 0; x < width; ++x) {
            const int sx = x - dx;
            if (sx < 0 || sx >= width) continue;
            for (int c = 0; c < channels; ++c)
                out[(static_cast<std::size_t>(y) * width + x) * channels + c] =
                    data[(static_cast<std::size_t>(sy) * width + sx) * channels + c];
        }
    }
    return out;
}

inline BoneMap apply_alignment(const BoneMap& map, const AlignmentTransform& xf) {
    BoneMap out(map.width, map.height);
    out.depth = shift_grid(map.depth, map.width, map.height, 1, xf.dx, xf.dy, 0.0f);
    out.normal = shift_grid(map.normal, map.width, map.height, 3, xf.dx, xf.dy, 0.0f);
    out.coverage = shift_grid<std::uint8_t>(map.coverage, map.width, map.height, 1, xf.dx, xf.dy, 0);
    return out;
}

}  // namespace bm4d
