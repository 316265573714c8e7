#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bonemap4d/errors.hpp"
#include "bonemap4d/math.hpp"

namespace bm4d {

inline constexpr int kJointCount = 23;
inline constexpr int kBoneCount = 22;
inline constexpr int kPelvisIndex = 0;

/// Canonical joint order: the SMPL body kinematic tree restricted to its
/// first 23 joints (pelvis root, spine chain, limbs; the left wrist keeps its
/// hand joint). See the table in the README.
inline const std::array<std::string, kJointCount>& joint_names() {
    static const std::array<std::string, kJointCount> names = {
        "pelvis",        "left_hip",      "right_hip",      "spine1",
        "left_knee",     "right_knee",    "spine2",         "left_ankle",
        "right_ankle",   "spine3",        "left_foot",      "right_foot",
        "neck",          "left_collar",   "right_collar",   "head",
        "left_shoulder", "right_shoulder", "left_elbow",    "right_elbow",
        "left_wrist",    "right_wrist",   "left_hand"};
    return names;
}

inline int joint_index(const std::string& name) {
    const auto& names = joint_names();
    for (int i = 0; i < kJointCount; ++i)
        if (names[i] == name) return i;
    return -1;
}

/// One frame of one subject: 23 world-space joint positions in meters.
struct JointSet {
    std::array<Vec3, kJointCount> positions{};

    const Vec3& pelvis() const { return positions[kPelvisIndex]; }

    void validate() const {
        for (int i = 0; i < kJointCount; ++i)
            if (!is_finite(positions[i]))
                throw ValueError("non-finite coordinate at joint '" + joint_names()[i] + "'");
    }
};

/// Bone tree over the joint set: (parent, child) pairs plus the per-edge
/// lateral radius r_x = r_y in meters.
struct BoneTopology {
    struct Edge {
        int parent;
        int child;
    };
    std::vector<Edge> edges;
    std::vector<double> thickness;

    void validate() const {
        if (edges.size() != kBoneCount)
            throw SchemaError("topology must have exactly 22 edges, got " +
                              std::to_string(edges.size()));
        if (thickness.size() != edges.size())
            throw SchemaError("thickness list must match edge count");
        std::array<int, kJointCount> parent_of{};
        parent_of.fill(-2);
        parent_of[kPelvisIndex] = -1;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const auto& e = edges[i];
            if (e.parent < 0 || e.parent >= kJointCount || e.child < 0 || e.child >= kJointCount)
                throw SchemaError("edge index out of range at edge " + std::to_string(i));
            if (e.parent == e.child)
                throw SchemaError("self-edge at edge " + std::to_string(i));
            if (e.child == kPelvisIndex)
                throw SchemaError("pelvis cannot be a child");
            if (parent_of[e.child] != -2)
                throw SchemaError("joint " + std::to_string(e.child) + " has two parents");
            parent_of[e.child] = e.parent;
            if (!(thickness[i] > 0.0))
                throw ValueError("thickness must be positive at edge " + std::to_string(i));
        }
        // Every non-pelvis joint has a parent chain reaching the pelvis.
        for (int j = 0; j < kJointCount; ++j) {
            int cur = j;
            int hops = 0;
            while (cur != kPelvisIndex) {
                cur = parent_of[cur];
                if (cur < 0 || ++hops > kJointCount)
                    throw SchemaError("edges do not form a tree rooted at the pelvis");
            }
        }
    }
};

/// Ordered frames of one motion clip; all frames share the joint ordering.
struct PoseSequence {
    std::vector<JointSet> frames;

    void validate() const {
        if (frames.empty()) throw SchemaError("pose sequence has no frames");
        for (const auto& f : frames) f.validate();
    }
};

/// Canonical bone tree with the default anthropometric radius table
/// (wrist-to-hand 2.5 cm; see README for the full table).
inline BoneTopology default_topology() {
    BoneTopology topo;
    // parent, child, radius [m]; ordered by child index.
    const struct {
        int parent, child;
        double radius;
    } rows[kBoneCount] = {
        {0, 1, 0.09},    // pelvis -> left_hip
        {0, 2, 0.09},    // pelvis -> right_hip
        {0, 3, 0.09},    // pelvis -> spine1
        {1, 4, 0.07},    // left_hip -> left_knee
        {2, 5, 0.07},    // right_hip -> right_knee
        {3, 6, 0.09},    // spine1 -> spine2
        {4, 7, 0.05},    // left_knee -> left_ankle
        {5, 8, 0.05},    // right_knee -> right_ankle
        {6, 9, 0.09},    // spine2 -> spine3
        {7, 10, 0.025},  // left_ankle -> left_foot
        {8, 11, 0.025},  // right_ankle -> right_foot
        {9, 12, 0.05},   // spine3 -> neck
        {9, 13, 0.045},  // spine3 -> left_collar
        {9, 14, 0.045},  // spine3 -> right_collar
        {12, 15, 0.09},  // neck -> head
        {13, 16, 0.045}, // left_collar -> left_shoulder
        {14, 17, 0.045}, // right_collar -> right_shoulder
        {16, 18, 0.045}, // left_shoulder -> left_elbow
        {17, 19, 0.045}, // right_shoulder -> right_elbow
        {18, 20, 0.035}, // left_elbow -> left_wrist
        {19, 21, 0.035}, // right_elbow -> right_wrist
        {20, 22, 0.025}, // left_wrist -> left_hand
    };
    for (const auto& r : rows) {
        topo.edges.push_back({r.parent, r.child});
        topo.thickness.push_back(r.radius);
    }
    return topo;
}

namespace detail {

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::out_of_range& e) {
        // Numbers that overflow a double (1e999 etc.) cannot become finite
        // coordinates.
        throw ValueError("non-finite number in " + path.string() + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace detail

/// Loads a skeleton-animation file:
///   {"units":"m","joint_names":[...23...],"frames":[[[x,y,z] x23], ...]}
/// Joint names must match the canonical order exactly.
inline PoseSequence load_pose_sequence(const std::filesystem::path& path) {
    const nlohmann::json doc = detail::parse_json_file(path);
    if (!doc.is_object()) throw SchemaError("pose file must be a JSON object");
    if (!doc.contains("units") || doc["units"] != "m")
        throw SchemaError("pose file must declare units \"m\"");
    if (!doc.contains("joint_names") || !doc["joint_names"].is_array() ||
        doc["joint_names"].size() != kJointCount)
        throw SchemaError("pose file must list exactly 23 joint names");
    const auto& names = joint_names();
    for (int i = 0; i < kJointCount; ++i) {
        if (doc["joint_names"][i] != names[i])
            throw SchemaError("joint name mismatch at index " + std::to_string(i) +
                              ": expected '" + names[i] + "'");
    }
    if (!doc.contains("frames") || !doc["frames"].is_array())
        throw SchemaError("pose file must contain a frames array");

    PoseSequence seq;
    for (const auto& frame : doc["frames"]) {
        if (!frame.is_array() || frame.size() != kJointCount)
            throw SchemaError("each frame must contain 23 joints");
        JointSet js;
        for (int i = 0; i < kJointCount; ++i) {
            const auto& p = frame[i];
            if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
                !p[2].is_number())
                throw SchemaError("joint position must be a [x,y,z] number triple");
            js.positions[i] = Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
        }
        seq.frames.push_back(js);
    }
    seq.validate();
    return seq;
}

inline void save_pose_sequence(const std::filesystem::path& path, const PoseSequence& seq) {
    nlohmann::json doc;
    doc["units"] = "m";
    doc["joint_names"] = joint_names();
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : seq.frames) {
        nlohmann::json frame = nlohmann::json::array();
        for (const auto& p : f.positions) frame.push_back({p.x(), p.y(), p.z()});
        frames.push_back(std::move(frame));
    }
    doc["frames"] = std::move(frames);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << doc.dump(1) << '\n';
}

/// Loads a topology file: {"edges":[[m,n],...],"thickness":[r,...]}.
inline BoneTopology load_topology(const std::filesystem::path& path) {
    const nlohmann::json doc = detail::parse_json_file(path);
    if (!doc.is_object() || !doc.contains("edges") || !doc.contains("thickness"))
        throw SchemaError("topology file must contain edges and thickness arrays");
    BoneTopology topo;
    for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2)
            throw SchemaError("each edge must be an [m,n] index pair");
        topo.edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    for (const auto& r : doc["thickness"]) topo.thickness.push_back(r.get<double>());
    topo.validate();
    return topo;
}

inline void save_topology(const std::filesystem::path& path, const BoneTopology& topo) {
    nlohmann::json doc;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : topo.edges) edges.push_back({e.parent, e.child});
    doc["edges"] = std::move(edges);
    doc["thickness"] = topo.thickness;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << doc.dump(1) << '\n';
}

}  // namespace bm4d
