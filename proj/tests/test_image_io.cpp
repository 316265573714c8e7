#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <zlib.h>

#include "bonemap4d/grid_io.hpp"
#include "bonemap4d/image_io.hpp"
#include "bonemap4d/sampler.hpp"

using namespace bm4d;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

BoneMap random_map(int w, int h, std::uint64_t seed) {
    BoneMap map(w, h);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> depth(0.5f, 4.0f);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if ((rng() & 3) == 0) continue;  // leave some background
            const std::size_t i = map.index(x, y);
            map.coverage[i] = 1;
            map.depth[i] = depth(rng);
            Eigen::Vector3d n(gauss(rng), gauss(rng), gauss(rng));
            n.normalize();
            for (int c = 0; c < 3; ++c) map.normal[i * 3 + c] = static_cast<float>(n[c]);
        }
    }
    return map;
}

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("PFM depth and normal images round-trip bit exactly") {
    const BoneMap map = random_map(17, 9, 31);

    const auto depth_path = temp_file("bm4d_depth.pfm");
    write_pfm_depth(depth_path, map);
    const PfmImage depth = read_pfm(depth_path);
    CHECK(depth.channels == 1);
    CHECK(depth.width == 17);
    CHECK(depth.height == 9);
    REQUIRE(depth.data.size() == map.depth.size());
    CHECK(std::memcmp(depth.data.data(), map.depth.data(), map.depth.size() * 4) == 0);

    const auto normal_path = temp_file("bm4d_normal.pfm");
    write_pfm_normal(normal_path, map);
    const PfmImage normal = read_pfm(normal_path);
    CHECK(normal.channels == 3);
    REQUIRE(normal.data.size() == map.normal.size());
    CHECK(std::memcmp(normal.data.data(), map.normal.data(), map.normal.size() * 4) == 0);

    SECTION("header starts with the magic and negative scale") {
        const std::string bytes = read_bytes(depth_path);
        CHECK(bytes.rfind("Pf\n17 9\n-1.0\n", 0) == 0);
    }

    SECTION("no temp file is left behind") {
        CHECK_FALSE(std::filesystem::exists(depth_path.string() + ".tmp"));
    }
}

TEST_CASE("PNG previews decode back to the encoded pixels") {
    const BoneMap map = random_map(13, 7, 77);
    const auto px = depth_preview(map);
    const auto path = temp_file("bm4d_depth.png");
    write_png_gray8(path, px, map.width, map.height);

    const std::string bytes = read_bytes(path);
    REQUIRE(bytes.size() > 8);
    CHECK(std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) == 0);

    // Walk the chunks, collect IDAT, inflate, strip filter bytes.
    std::size_t pos = 8;
    std::string idat;
    int width = 0, height = 0, bit_depth = 0, color_type = -1;
    while (pos + 8 <= bytes.size()) {
        const auto be32 = [&](std::size_t p) {
            return (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[p])) << 24) |
                   (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[p + 1])) << 16) |
                   (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[p + 2])) << 8) |
                   static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[p + 3]));
        };
        const std::uint32_t len = be32(pos);
        const std::string type = bytes.substr(pos + 4, 4);
        const std::string data = bytes.substr(pos + 8, len);
        if (type == "IHDR") {
            width = static_cast<int>(be32(pos + 8));
            height = static_cast<int>(be32(pos + 12));
            bit_depth = static_cast<unsigned char>(data[8]);
            color_type = static_cast<unsigned char>(data[9]);
        } else if (type == "IDAT") {
            idat += data;
        }
        pos += 12 + len;
    }
    CHECK(width == map.width);
    CHECK(height == map.height);
    CHECK(bit_depth == 8);
    CHECK(color_type == 0);

    std::vector<unsigned char> raw((static_cast<std::size_t>(map.width) + 1) * map.height);
    uLongf raw_size = static_cast<uLongf>(raw.size());
    REQUIRE(uncompress(raw.data(), &raw_size, reinterpret_cast<const Bytef*>(idat.data()),
                       static_cast<uLong>(idat.size())) == Z_OK);
    REQUIRE(raw_size == raw.size());
    for (int y = 0; y < map.height; ++y) {
        CHECK(raw[static_cast<std::size_t>(y) * (map.width + 1)] == 0);  // filter byte
        for (int x = 0; x < map.width; ++x)
            CHECK(raw[static_cast<std::size_t>(y) * (map.width + 1) + 1 + x] ==
                  px[map.index(x, y)]);
    }
}

TEST_CASE("preview mappings follow the documented conventions") {
    BoneMap map(2, 1);
    map.coverage[0] = 1;
    map.depth[0] = 2.0f;
    map.normal[0] = 0.0f;
    map.normal[1] = 0.0f;
    map.normal[2] = -1.0f;

    const auto depth_px = depth_preview(map);
    CHECK(depth_px[0] == 255);  // the max covered depth maps to full white
    CHECK(depth_px[1] == 0);    // background stays black

    const auto normal_px = normal_preview(map);
    CHECK(normal_px[0] == 128);
    CHECK(normal_px[1] == 128);
    CHECK(normal_px[2] == 0);
    CHECK(normal_px[3] == 0);
    CHECK(normal_px[4] == 0);
    CHECK(normal_px[5] == 0);
}

TEST_CASE("latent grid container round-trips through the documented layout") {
    const LatentShape shape{3, 4, 5};
    const LatentGrid grid = make_noise_grid(2, 3, shape, 0, 2025);
    const auto path = temp_file("bm4d_grid.bin");
    write_latent_grid(path, grid);

    SECTION("header carries magic and dims") {
        const std::string bytes = read_bytes(path);
        CHECK(bytes.rfind("BM4DGRID", 0) == 0);
        CHECK(bytes.size() == 8 + 6 * 4 + grid.cells.size() * shape.cell_size() * 4);
    }

    SECTION("values survive as 32-bit floats") {
        const LatentGrid loaded = read_latent_grid(path);
        CHECK(loaded.frames == 2);
        CHECK(loaded.views == 3);
        CHECK(loaded.shape.channels == 3);
        CHECK(loaded.shape.height == 4);
        CHECK(loaded.shape.width == 5);
        for (std::size_t i = 0; i < grid.cells.size(); ++i)
            for (std::size_t e = 0; e < grid.cells[i].size(); ++e)
                CHECK(loaded.cells[i][e] == static_cast<double>(static_cast<float>(grid.cells[i][e])));
    }

    SECTION("truncated files are rejected") {
        const std::string bytes = read_bytes(path);
        const auto bad_path = temp_file("bm4d_grid_trunc.bin");
        write_file_atomic(bad_path, bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_AS(read_latent_grid(bad_path), ParseError);
    }

    SECTION("foreign files are rejected") {
        const auto bad_path = temp_file("bm4d_grid_bad.bin");
        write_file_atomic(bad_path, "definitely not a grid");
        CHECK_THROWS_AS(read_latent_grid(bad_path), ParseError);
    }
}
