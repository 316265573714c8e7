#pragma once

#include <string>
#include <vector>

#include "bonemap4d/errors.hpp"
#include "bonemap4d/math.hpp"
#include "bonemap4d/skeleton.hpp"

namespace bm4d {

/// Volumetric proxy for one bone: an ellipsoid whose local z-axis follows the
/// bone. rotation maps ellipsoid-local coordinates to world, so
/// rotation * e_z equals the unit bone direction.
struct BoneEllipsoid {
    Vec3 center = Vec3::Zero();
    Mat3 rotation = Mat3::Identity();
    Vec3 radii = Vec3::Ones();  // (r_x, r_y, r_z), r_x == r_y
    int bone_id = -1;
};

/// Rotation R with R * u = v for unit vectors u, v (Rodrigues form).
///
/// Near v = -u the axis is ambiguous; the tie-break rotates pi about the
/// world x-axis projected orthogonal to u (y-axis when u is within 0.99 of
/// +-x). The map is continuous in v everywhere else.
inline Mat3 align_rotation(const Vec3& v, const Vec3& u) {
    if (!is_unit(v, 1e-6) || !is_unit(u, 1e-6))
        throw DegenerateInput("align_rotation requires unit vectors");

    // h = 1 + u.v, computed via the sum vector so it stays accurate near the
    // antiparallel singularity.
    const double h = 0.5 * (u + v).squaredNorm();
    if (h < 1e-12) {
        const Vec3 seed = std::abs(u.x()) > 0.99 ? Vec3::UnitY() : Vec3::UnitX();
        const Vec3 axis = (seed - seed.dot(u) * u).normalized();
        return 2.0 * axis * axis.transpose() - Mat3::Identity();
    }
    const Vec3 w = u.cross(v);
    Mat3 k;
    k << 0.0, -w.z(), w.y(),
         w.z(), 0.0, -w.x(),
         -w.y(), w.x(), 0.0;
    return Mat3::Identity() + k + (k * k) / h;
}

/// Ellipsoid for the bone segment j_m -> j_n: centered at the midpoint,
/// r_z = half the bone length, r_x = r_y = thickness.
inline BoneEllipsoid build_ellipsoid(const Vec3& j_m, const Vec3& j_n, double thickness,
                                     int bone_id = -1) {
    const Vec3 d = j_n - j_m;
    const double len = d.norm();
    if (!(len > 1e-6))
        throw DegenerateBone("bone joints coincide", bone_id);
    if (!(thickness > 0.0))
        throw ValueError("bone thickness must be positive");

    BoneEllipsoid e;
    e.center = 0.5 * (j_m + j_n);
    e.radii = Vec3(thickness, thickness, 0.5 * len);
    e.rotation = align_rotation(d / len, Vec3::UnitZ());
    e.bone_id = bone_id;
    return e;
}

/// One ellipsoid per topology edge, ordered by edge index.
inline std::vector<BoneEllipsoid> build_skeleton_ellipsoids(const JointSet& pose,
                                                            const BoneTopology& topo) {
    std::vector<BoneEllipsoid> out;
    out.reserve(topo.edges.size());
    for (std::size_t i = 0; i < topo.edges.size(); ++i) {
        const auto& e = topo.edges[i];
        try {
            out.push_back(build_ellipsoid(pose.positions[e.parent], pose.positions[e.child],
                                          topo.thickness[i], static_cast<int>(i)));
        } catch (const DegenerateBone&) {
            throw DegenerateBone("degenerate bone at edge " + std::to_string(i) + " (" +
                                     joint_names()[e.parent] + " -> " + joint_names()[e.child] +
                                     ")",
                                 static_cast<int>(i));
        }
    }
    return out;
}

}  // namespace bm4d
