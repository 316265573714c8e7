#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace bm4d {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline bool is_finite(const Vec3& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

inline bool is_unit(const Vec3& v, double tol) {
    return std::abs(v.norm() - 1.0) < tol;
}

// Max absolute entry of R^T R - I; 0 for a perfectly orthonormal matrix.
inline double orthonormality_error(const Mat3& r) {
    return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

inline bool is_rotation(const Mat3& r, double tol) {
    return orthonormality_error(r) < tol && std::abs(r.determinant() - 1.0) < tol;
}

}  // namespace bm4d
