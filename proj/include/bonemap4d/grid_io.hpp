#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "bonemap4d/errors.hpp"
#include "bonemap4d/image_io.hpp"
#include "bonemap4d/sampler.hpp"

namespace bm4d {

// Latent grid container: 8-byte magic "BM4DGRID", six little-endian uint32
// fields (version, frames, views, channels, height, width), then
// frames*views*channels*height*width little-endian 32-bit floats in row-major
// (frame, view, channel, row, column) order.

inline constexpr char kGridMagic[9] = "BM4DGRID";
inline constexpr std::uint32_t kGridVersion = 1;

namespace detail {

inline void append_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t read_u32le(std::istream& in, const std::string& what) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw ParseError("truncated grid header: " + what);
    return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

}  // namespace detail

inline void write_latent_grid(const std::filesystem::path& path, const LatentGrid& grid) {
    std::string out(kGridMagic, 8);
    detail::append_u32le(out, kGridVersion);
    detail::append_u32le(out, static_cast<std::uint32_t>(grid.frames));
    detail::append_u32le(out, static_cast<std::uint32_t>(grid.views));
    detail::append_u32le(out, static_cast<std::uint32_t>(grid.shape.channels));
    detail::append_u32le(out, static_cast<std::uint32_t>(grid.shape.height));
    detail::append_u32le(out, static_cast<std::uint32_t>(grid.shape.width));
    for (const auto& cell : grid.cells) {
        for (double x : cell) {
            const float f = static_cast<float>(x);
            char buf[4];
            std::memcpy(buf, &f, 4);
            out.append(buf, 4);
        }
    }
    write_file_atomic(path, out);
}

inline LatentGrid read_latent_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kGridMagic, 8) != 0)
        throw ParseError("not a latent grid file: " + path.string());
    if (detail::read_u32le(in, "version") != kGridVersion)
        throw ParseError("unsupported grid version: " + path.string());
    const int frames = static_cast<int>(detail::read_u32le(in, "frames"));
    const int views = static_cast<int>(detail::read_u32le(in, "views"));
    LatentShape shape;
    shape.channels = static_cast<int>(detail::read_u32le(in, "channels"));
    shape.height = static_cast<int>(detail::read_u32le(in, "height"));
    shape.width = static_cast<int>(detail::read_u32le(in, "width"));
    LatentGrid grid = LatentGrid::zeros(frames, views, shape, 0);
    for (auto& cell : grid.cells) {
        for (auto& x : cell) {
            char buf[4];
            in.read(buf, 4);
            if (!in) throw ParseError("truncated grid data: " + path.string());
            float f;
            std::memcpy(&f, buf, 4);
            x = f;
        }
    }
    return grid;
}

}  // namespace bm4d
