#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "bonemap4d/camera.hpp"
#include "bonemap4d/math.hpp"
#include "bonemap4d/skeleton.hpp"

namespace fixtures {

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(BM4D_DATA_DIR) / name;
}

// Canonical upright rest pose: subject at the origin, y up, facing +z,
// arms out along +-x. Matches the committed tpose.json fixture.
inline bm4d::JointSet make_tpose() {
    using bm4d::Vec3;
    bm4d::JointSet js;
    js.positions = {
        Vec3(0.00, 0.95, 0.00),   // pelvis
        Vec3(0.09, 0.89, 0.00),   // left_hip
        Vec3(-0.09, 0.89, 0.00),  // right_hip
        Vec3(0.00, 1.07, 0.00),   // spine1
        Vec3(0.09, 0.51, 0.00),   // left_knee
        Vec3(-0.09, 0.51, 0.00),  // right_knee
        Vec3(0.00, 1.19, 0.00),   // spine2
        Vec3(0.09, 0.11, 0.00),   // left_ankle
        Vec3(-0.09, 0.11, 0.00),  // right_ankle
        Vec3(0.00, 1.31, 0.00),   // spine3
        Vec3(0.09, 0.05, 0.13),   // left_foot
        Vec3(-0.09, 0.05, 0.13),  // right_foot
        Vec3(0.00, 1.39, 0.00),   // neck
        Vec3(0.06, 1.37, 0.00),   // left_collar
        Vec3(-0.06, 1.37, 0.00),  // right_collar
        Vec3(0.00, 1.51, 0.00),   // head
        Vec3(0.22, 1.37, 0.00),   // left_shoulder
        Vec3(-0.22, 1.37, 0.00),  // right_shoulder
        Vec3(0.48, 1.37, 0.00),   // left_elbow
        Vec3(-0.48, 1.37, 0.00),  // right_elbow
        Vec3(0.73, 1.37, 0.00),   // left_wrist
        Vec3(-0.73, 1.37, 0.00),  // right_wrist
        Vec3(0.81, 1.37, 0.00),   // left_hand
    };
    return js;
}

// Scripted forward-kinematics walk cycle used to generate the committed
// walk24.json fixture: sinusoidal hip/shoulder swings chained down the limbs,
// pelvis sway and bob, slight torso yaw. Frame 0 keeps the pelvis at
// (0, 0.95, 0) exactly.
inline bm4d::PoseSequence make_walk(int frames = 24) {
    using bm4d::Vec3;
    using bm4d::Mat3;
    auto rot_x = [](double a) {
        Mat3 m;
        m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
        return m;
    };
    auto rot_y = [](double a) {
        Mat3 m;
        m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
        return m;
    };
    auto rot_z = [](double a) {
        Mat3 m;
        m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
        return m;
    };

    bm4d::PoseSequence seq;
    for (int t = 0; t < frames; ++t) {
        const double phi = 2.0 * M_PI * t / frames;
        bm4d::JointSet js;
        auto set = [&js](int idx, const Vec3& p) { js.positions[idx] = p; };

        const Vec3 pelvis(0.02 * std::sin(phi), 0.95 - 0.0075 * (1.0 - std::cos(2.0 * phi)), 0.0);
        set(0, pelvis);

        // Torso column with a gentle yaw of the shoulder girdle.
        const double yaw = 0.08 * std::sin(phi);
        const Mat3 girdle = rot_y(yaw);
        const Vec3 spine1 = pelvis + Vec3(0, 0.12, 0);
        const Vec3 spine2 = spine1 + Vec3(0, 0.12, 0);
        const Vec3 spine3 = spine2 + Vec3(0, 0.12, 0);
        const Vec3 neck = spine3 + Vec3(0, 0.08, 0);
        const Vec3 head = neck + Vec3(0, 0.12, 0);
        set(3, spine1);
        set(6, spine2);
        set(9, spine3);
        set(12, neck);
        set(15, head);

        const Vec3 l_collar = spine3 + girdle * Vec3(0.06, 0.06, 0);
        const Vec3 r_collar = spine3 + girdle * Vec3(-0.06, 0.06, 0);
        const Vec3 l_shoulder = l_collar + girdle * Vec3(0.16, 0, 0);
        const Vec3 r_shoulder = r_collar + girdle * Vec3(-0.16, 0, 0);
        set(13, l_collar);
        set(14, r_collar);
        set(16, l_shoulder);
        set(17, r_shoulder);

        // Arms: lowered from the T-pose and counter-swinging the legs.
        const double adduct = 1.1;
        const double elbow_bend = 0.25;
        const double l_swing = 0.45 * std::sin(phi + M_PI);
        const double r_swing = 0.45 * std::sin(phi);
        const Mat3 l_arm = girdle * rot_x(l_swing) * rot_z(-adduct);
        const Mat3 r_arm = girdle * rot_x(r_swing) * rot_z(adduct);
        const Mat3 l_fore = l_arm * rot_x(elbow_bend);
        const Mat3 r_fore = r_arm * rot_x(elbow_bend);
        const Vec3 l_elbow = l_shoulder + l_arm * Vec3(0.26, 0, 0);
        const Vec3 r_elbow = r_shoulder + r_arm * Vec3(-0.26, 0, 0);
        const Vec3 l_wrist = l_elbow + l_fore * Vec3(0.25, 0, 0);
        const Vec3 r_wrist = r_elbow + r_fore * Vec3(-0.25, 0, 0);
        set(18, l_elbow);
        set(19, r_elbow);
        set(20, l_wrist);
        set(21, r_wrist);
        set(22, l_wrist + l_fore * Vec3(0.08, 0, 0));

        // Legs: alternating hip swing with a knee bend on the trailing leg.
        const Vec3 l_hip = pelvis + Vec3(0.09, -0.06, 0);
        const Vec3 r_hip = pelvis + Vec3(-0.09, -0.06, 0);
        set(1, l_hip);
        set(2, r_hip);
        const double l_leg_phase = phi;
        const double r_leg_phase = phi + M_PI;
        auto leg = [&](const Vec3& hip, double phase, int knee_idx, int ankle_idx, int foot_idx) {
            const double swing = 0.5 * std::sin(phase);
            const double bend = 0.3 * 0.5 * (1.0 - std::cos(phase));
            const Mat3 thigh = rot_x(-swing);
            const Mat3 shank = rot_x(-swing + bend);
            const Vec3 knee = hip + thigh * Vec3(0, -0.38, 0);
            const Vec3 ankle = knee + shank * Vec3(0, -0.40, 0);
            set(knee_idx, knee);
            set(ankle_idx, ankle);
            set(foot_idx, ankle + shank * Vec3(0, -0.06, 0.13));
        };
        leg(l_hip, l_leg_phase, 4, 7, 10);
        leg(r_hip, r_leg_phase, 5, 8, 11);

        seq.frames.push_back(js);
    }
    return seq;
}

// Circular rig at the subject's height, all views looking at `target`.
// View 0 sits on the +z axis; views advance counter-clockwise (seen from
// above). Matches the committed cameras_ring*.json fixtures.
inline std::vector<bm4d::CameraRig> make_ring_rig(int views, int size = 576, double fx = 500.0,
                                                  double radius = 2.7,
                                                  const bm4d::Vec3& target = bm4d::Vec3(0.0, 0.9,
                                                                                        0.0)) {
    std::vector<bm4d::CameraRig> rigs;
    for (int k = 0; k < views; ++k) {
        const double theta = 2.0 * M_PI * k / views;
        const bm4d::Vec3 pos =
            target + radius * bm4d::Vec3(std::sin(theta), 0.0, std::cos(theta));
        rigs.push_back(bm4d::make_look_at_rig(pos, target, bm4d::Vec3(0, 1, 0), fx, fx, size, size));
    }
    return rigs;
}

}  // namespace fixtures
