#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "bonemap4d/camera.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace bm4d;

namespace {

CameraRig identity_rig() {
    CameraRig rig;
    rig.fx = rig.fy = 1.0;
    rig.cx = rig.cy = 0.0;
    rig.width = rig.height = 1;
    return rig;
}

Mat3 rot_y(double a) {
    Mat3 m;
    m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
    return m;
}

}  // namespace

TEST_CASE("project follows the pinhole model") {
    SECTION("point on the optical axis") {
        const Projection p = project(identity_rig(), Vec3(0, 0, 1));
        CHECK(p.u == 0.0);
        CHECK(p.v == 0.0);
        CHECK(p.depth == 1.0);
    }

    SECTION("point behind the camera") {
        CHECK_THROWS_AS(project(identity_rig(), Vec3(0, 0, -1)), BehindCamera);
    }

    SECTION("hand-checked pinhole arithmetic") {
        CameraRig rig;
        rig.fx = rig.fy = 500.0;
        rig.cx = rig.cy = 288.0;
        rig.width = rig.height = 576;
        const Projection p = project(rig, Vec3(0.1, 0, 2));
        CHECK(p.u == Catch::Approx(288.0 + 500.0 * 0.05).margin(1e-12));  // 313
        CHECK(p.v == Catch::Approx(288.0).margin(1e-12));
        CHECK(p.depth == Catch::Approx(std::sqrt(0.1 * 0.1 + 4.0)).margin(1e-12));
        CHECK(project(rig, Vec3(0.1, 0, 2), DepthMode::kZ).depth == Catch::Approx(2.0).margin(1e-15));
    }

    SECTION("scale consistency: p and 2p project identically with doubled depth") {
        CameraRig rig;
        rig.fx = rig.fy = 350.0;
        rig.cx = rig.cy = 128.0;
        rig.width = rig.height = 256;
        auto rng = oracles::make_rng(11);
        std::uniform_real_distribution<double> coord(-1.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            const Vec3 p(coord(rng), coord(rng), 1.0 + std::abs(coord(rng)));
            const Projection a = project(rig, p);
            const Projection b = project(rig, 2.0 * p);
            CHECK(a.u == b.u);
            CHECK(a.v == b.v);
            CHECK(b.depth == 2.0 * a.depth);
        }
    }
}

TEST_CASE("world_to_camera_normal rotates without translating") {
    CameraRig rig = identity_rig();
    SECTION("identity rotation") {
        CHECK(world_to_camera_normal(rig, Vec3(0, 1, 0)) == Vec3(0, 1, 0));
    }

    SECTION("90 degrees about y matches the matrix oracle") {
        rig.rotation_wc = rot_y(M_PI / 2.0);
        const Vec3 n = world_to_camera_normal(rig, Vec3(1, 0, 0));
        CHECK((n - Vec3(0, 0, -1)).norm() < 1e-12);
    }

    SECTION("unit norm is preserved") {
        auto rng = oracles::make_rng(3);
        for (int i = 0; i < 200; ++i) {
            rig.rotation_wc = oracles::random_rotation(rng);
            const Vec3 n = world_to_camera_normal(rig, oracles::random_unit_vector(rng));
            CHECK(std::abs(n.norm() - 1.0) < 1e-9);
        }
    }

    SECTION("non-unit input is rejected") {
        CHECK_THROWS_AS(world_to_camera_normal(rig, Vec3(0, 2, 0)), DegenerateInput);
    }
}

TEST_CASE("relative_rotation anchors the first view at the identity") {
    CameraRig rig = identity_rig();
    rig.rotation_wc = rot_y(0.4);

    SECTION("empty input") {
        CHECK_THROWS_AS(relative_rotation({}), EmptyInput);
    }

    SECTION("single rig yields exactly the identity") {
        const auto rel = relative_rotation({rig});
        REQUIRE(rel.size() == 1);
        CHECK(rel[0] == Mat3::Identity());
    }

    SECTION("two identical rigs") {
        const auto rel = relative_rotation({rig, rig});
        CHECK((rel[1] - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("30 degree offset about y matches the composed-matrix oracle") {
        CameraRig other = rig;
        other.rotation_wc = rot_y(M_PI / 6.0) * rig.rotation_wc;
        const auto rel = relative_rotation({rig, other});
        CHECK((rel[1] - rot_y(M_PI / 6.0)).cwiseAbs().maxCoeff() < 1e-9);
    }

    SECTION("outputs are orthonormal with det +1 over random rigs") {
        auto rng = oracles::make_rng(17);
        std::vector<CameraRig> rigs;
        for (int i = 0; i < 16; ++i) {
            CameraRig r = identity_rig();
            r.rotation_wc = oracles::random_rotation(rng);
            rigs.push_back(r);
        }
        for (const auto& m : relative_rotation(rigs)) {
            CHECK(orthonormality_error(m) < 1e-9);
            CHECK(std::abs(m.determinant() - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("camera validation catches bad rigs") {
    CameraRig rig = identity_rig();
    SECTION("valid") { rig.validate(); }
    SECTION("negative focal") {
        rig.fx = -1.0;
        CHECK_THROWS_AS(rig.validate(), ValueError);
    }
    SECTION("principal point outside image") {
        rig.cx = 5.0;
        CHECK_THROWS_AS(rig.validate(), ValueError);
    }
    SECTION("improper rotation") {
        rig.rotation_wc(0, 0) = -1.0;  // det -1
        CHECK_THROWS_AS(rig.validate(), ValueError);
    }
}

TEST_CASE("look-at rigs use the right-down-forward convention") {
    const auto rigs = fixtures::make_ring_rig(8);
    REQUIRE(rigs.size() == 8);
    // View 0 sits on +z looking back toward -z: right = +x, down = -y.
    Mat3 expected;
    expected << 1, 0, 0, 0, -1, 0, 0, 0, -1;
    CHECK((rigs[0].rotation_wc - expected).cwiseAbs().maxCoeff() < 1e-12);
    for (const auto& rig : rigs) {
        rig.validate();
        // The target projects to the principal point.
        const Projection p = project(rig, Vec3(0, 0.9, 0));
        CHECK(std::abs(p.u - 288.0) < 1e-9);
        CHECK(std::abs(p.v - 288.0) < 1e-9);
        CHECK(p.depth == Catch::Approx(2.7).margin(1e-12));
    }
}

TEST_CASE("camera files round-trip and are validated") {
    const auto rigs = fixtures::make_ring_rig(4, 96, 80.0);
    const auto path = std::filesystem::temp_directory_path() / "bm4d_cams.json";
    save_cameras(path, rigs);
    const auto loaded = load_cameras(path);
    REQUIRE(loaded.size() == rigs.size());
    for (std::size_t i = 0; i < rigs.size(); ++i) {
        CHECK(loaded[i].fx == rigs[i].fx);
        CHECK(loaded[i].rotation_wc == rigs[i].rotation_wc);
        CHECK(loaded[i].translation_wc == rigs[i].translation_wc);
        CHECK(loaded[i].width == rigs[i].width);
    }
    CHECK_THROWS_AS(load_cameras("/nonexistent/cams.json"), IoError);
}

TEST_CASE("committed ring-rig fixtures match their generator") {
    const auto eight = load_cameras(fixtures::data_path("cameras_ring8.json"));
    const auto gen8 = fixtures::make_ring_rig(8);
    REQUIRE(eight.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(eight[i].rotation_wc == gen8[i].rotation_wc);
        CHECK(eight[i].translation_wc == gen8[i].translation_wc);
    }
    const auto six = load_cameras(fixtures::data_path("cameras_ring6.json"));
    CHECK(six.size() == 6);
}
