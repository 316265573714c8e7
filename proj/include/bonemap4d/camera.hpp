#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bonemap4d/errors.hpp"
#include "bonemap4d/math.hpp"
#include "bonemap4d/skeleton.hpp"

namespace bm4d {

// Depth written into bone maps: Euclidean ray distance in camera space
// (default) or the camera-space z coordinate.
enum class DepthMode { kEuclidean, kZ };

inline DepthMode parse_depth_mode(const std::string& name) {
    if (name == "euclidean") return DepthMode::kEuclidean;
    if (name == "z") return DepthMode::kZ;
    throw ConfigError("unknown depth mode: " + name);
}

/// Pinhole camera. Convention: right-handed, camera looks down +z, image u
/// rightward, v downward; p_cam = rotation_wc * p_world + translation_wc.
/// Pixel (i, j) samples projection coordinates (u, v) = (i, j) exactly.
struct CameraRig {
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    Mat3 rotation_wc = Mat3::Identity();
    Vec3 translation_wc = Vec3::Zero();
    int width = 0, height = 0;

    Vec3 camera_center() const { return -(rotation_wc.transpose() * translation_wc); }

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0)) throw ValueError("focal lengths must be positive");
        if (width <= 0 || height <= 0) throw ValueError("image size must be positive");
        if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height)
            throw ValueError("principal point must lie inside the image");
        if (!is_rotation(rotation_wc, 1e-9))
            throw ValueError("rotation_wc is not a proper rotation");
    }
};

struct Projection {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;  // meters, per DepthMode
};

inline Projection project(const CameraRig& rig, const Vec3& p_world,
                          DepthMode mode = DepthMode::kEuclidean) {
    const Vec3 p_cam = rig.rotation_wc * p_world + rig.translation_wc;
    if (p_cam.z() <= 1e-6) throw BehindCamera("point is behind the camera");
    Projection out;
    out.u = rig.fx * p_cam.x() / p_cam.z() + rig.cx;
    out.v = rig.fy * p_cam.y() / p_cam.z() + rig.cy;
    out.depth = (mode == DepthMode::kEuclidean) ? p_cam.norm() : p_cam.z();
    return out;
}

/// Rotates a world-space unit normal into camera space (no translation).
inline Vec3 world_to_camera_normal(const CameraRig& rig, const Vec3& n_world) {
    if (!is_unit(n_world, 1e-6)) throw DegenerateInput("normal must be a unit vector");
    return rig.rotation_wc * n_world;
}

/// Per-view rotations relative to view 0; output[0] is the exact identity.
inline std::vector<Mat3> relative_rotation(const std::vector<CameraRig>& rigs) {
    if (rigs.empty()) throw EmptyInput("relative_rotation needs at least one rig");
    std::vector<Mat3> out;
    out.reserve(rigs.size());
    const Mat3 base_t = rigs.front().rotation_wc.transpose();
    out.push_back(Mat3::Identity());
    for (std::size_t i = 1; i < rigs.size(); ++i)
        out.push_back(rigs[i].rotation_wc * base_t);
    return out;
}

/// Camera at `position` looking at `target`, image upright w.r.t. `up`,
/// principal point at the image center.
inline CameraRig make_look_at_rig(const Vec3& position, const Vec3& target, const Vec3& up,
                                  double fx, double fy, int width, int height) {
    const Vec3 forward = (target - position).normalized();
    Vec3 right = forward.cross(up);
    if (right.norm() < 1e-9)
        throw DegenerateInput("look direction parallel to up vector");
    right.normalize();
    const Vec3 down = forward.cross(right);

    CameraRig rig;
    rig.fx = fx;
    rig.fy = fy;
    rig.width = width;
    rig.height = height;
    rig.cx = width / 2.0;
    rig.cy = height / 2.0;
    rig.rotation_wc.row(0) = right;
    rig.rotation_wc.row(1) = down;
    rig.rotation_wc.row(2) = forward;
    rig.translation_wc = -(rig.rotation_wc * position);
    rig.validate();
    return rig;
}

/// Loads a camera file:
///   {"views":[{"fx":..,"fy":..,"cx":..,"cy":..,"R":[9 row-major],"t":[3],
///              "width":576,"height":576}, ...]}
inline std::vector<CameraRig> load_cameras(const std::filesystem::path& path) {
    const nlohmann::json doc = detail::parse_json_file(path);
    if (!doc.is_object() || !doc.contains("views") || !doc["views"].is_array())
        throw SchemaError("camera file must contain a views array");
    std::vector<CameraRig> rigs;
    for (const auto& view : doc["views"]) {
        for (const char* key : {"fx", "fy", "cx", "cy", "R", "t", "width", "height"})
            if (!view.contains(key))
                throw SchemaError(std::string("camera view missing field '") + key + "'");
        if (view["R"].size() != 9 || view["t"].size() != 3)
            throw SchemaError("camera R must have 9 entries and t must have 3");
        CameraRig rig;
        rig.fx = view["fx"].get<double>();
        rig.fy = view["fy"].get<double>();
        rig.cx = view["cx"].get<double>();
        rig.cy = view["cy"].get<double>();
        rig.width = view["width"].get<int>();
        rig.height = view["height"].get<int>();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) rig.rotation_wc(r, c) = view["R"][3 * r + c].get<double>();
        for (int i = 0; i < 3; ++i) rig.translation_wc[i] = view["t"][i].get<double>();
        rig.validate();
        rigs.push_back(rig);
    }
    if (rigs.empty()) throw SchemaError("camera file lists no views");
    return rigs;
}

inline void save_cameras(const std::filesystem::path& path, const std::vector<CameraRig>& rigs) {
    nlohmann::json views = nlohmann::json::array();
    for (const auto& rig : rigs) {
        nlohmann::json v;
        v["fx"] = rig.fx;
        v["fy"] = rig.fy;
        v["cx"] = rig.cx;
        v["cy"] = rig.cy;
        v["width"] = rig.width;
        v["height"] = rig.height;
        nlohmann::json r = nlohmann::json::array();
        for (int row = 0; row < 3; ++row)
            for (int col = 0; col < 3; ++col) r.push_back(rig.rotation_wc(row, col));
        v["R"] = std::move(r);
        v["t"] = {rig.translation_wc.x(), rig.translation_wc.y(), rig.translation_wc.z()};
        views.push_back(std::move(v));
    }
    nlohmann::json doc;
    doc["views"] = std::move(views);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << doc.dump(1) << '\n';
}

}  // namespace bm4d
