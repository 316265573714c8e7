#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "bonemap4d/errors.hpp"
#include "bonemap4d/renderer.hpp"

namespace bm4d {

// All writers go through a temp file + rename so partially written outputs
// never appear under the final name.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write file: " + path.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("short write to file: " + path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move temp file into place: " + path.string());
}

// ---------------------------------------------------------------------------
// PFM (32-bit float, little-endian, rows bottom-to-top per the PFM spec).

namespace detail {

inline std::string pfm_bytes(const float* data, int width, int height, int channels) {
    std::string out = channels == 3 ? "PF\n" : "Pf\n";
    out += std::to_string(width) + " " + std::to_string(height) + "\n-1.0\n";
    const std::size_t row = static_cast<std::size_t>(width) * channels;
    out.reserve(out.size() + row * height * sizeof(float));
    for (int y = height - 1; y >= 0; --y)
        out.append(reinterpret_cast<const char*>(data + static_cast<std::size_t>(y) * row),
                   row * sizeof(float));
    return out;
}

}  // namespace detail

inline void write_pfm_depth(const std::filesystem::path& path, const BoneMap& map) {
    write_file_atomic(path, detail::pfm_bytes(map.depth.data(), map.width, map.height, 1));
}

inline void write_pfm_normal(const std::filesystem::path& path, const BoneMap& map) {
    write_file_atomic(path, detail::pfm_bytes(map.normal.data(), map.width, map.height, 3));
}

struct PfmImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;  // top-down rows
};

inline PfmImage read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::string magic;
    in >> magic;
    PfmImage img;
    if (magic == "PF")
        img.channels = 3;
    else if (magic == "Pf")
        img.channels = 1;
    else
        throw ParseError("not a PFM file: " + path.string());
    double scale = 0.0;
    in >> img.width >> img.height >> scale;
    if (!in || img.width <= 0 || img.height <= 0)
        throw ParseError("bad PFM header: " + path.string());
    if (scale >= 0.0) throw ParseError("big-endian PFM is not supported: " + path.string());
    in.get();  // single whitespace after the scale
    img.data.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
    const std::size_t row = static_cast<std::size_t>(img.width) * img.channels;
    for (int y = img.height - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(img.data.data() + static_cast<std::size_t>(y) * row),
                static_cast<std::streamsize>(row * sizeof(float)));
        if (!in) throw ParseError("truncated PFM data: " + path.string());
    }
    return img;
}

// ---------------------------------------------------------------------------
// Minimal 8-bit PNG writer (gray or RGB) over zlib.

namespace detail {

inline void png_append_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

inline void png_append_chunk(std::string& out, const char type[4], const std::string& data) {
    png_append_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.append(type, 4);
    out += data;
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data() + crc_start),
                           static_cast<uInt>(out.size() - crc_start));
    png_append_u32(out, static_cast<std::uint32_t>(crc));
}

inline std::string png_bytes(const std::uint8_t* pixels, int width, int height, int channels) {
    const std::size_t row = static_cast<std::size_t>(width) * channels;
    std::string raw;
    raw.reserve((row + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw.push_back('\0');  // filter type: none
        raw.append(reinterpret_cast<const char*>(pixels + static_cast<std::size_t>(y) * row), row);
    }
    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(compressed_size, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &compressed_size,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw IoError("zlib compression failed");
    compressed.resize(compressed_size);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    png_append_u32(ihdr, static_cast<std::uint32_t>(width));
    png_append_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                               // bit depth
    ihdr.push_back(channels == 3 ? 2 : 0);           // color type
    ihdr.append(3, '\0');                            // compression, filter, interlace
    png_append_chunk(out, "IHDR", ihdr);
    png_append_chunk(out, "IDAT", compressed);
    png_append_chunk(out, "IEND", "");
    return out;
}

}  // namespace detail

inline void write_png_gray8(const std::filesystem::path& path, const std::vector<std::uint8_t>& px,
                            int width, int height) {
    write_file_atomic(path, detail::png_bytes(px.data(), width, height, 1));
}

inline void write_png_rgb8(const std::filesystem::path& path, const std::vector<std::uint8_t>& px,
                           int width, int height) {
    write_file_atomic(path, detail::png_bytes(px.data(), width, height, 3));
}

// Depth preview: covered depth normalized by the max covered depth;
// background maps to black.
inline std::vector<std::uint8_t> depth_preview(const BoneMap& map) {
    float max_depth = 0.0f;
    for (std::size_t i = 0; i < map.depth.size(); ++i)
        if (map.coverage[i]) max_depth = std::max(max_depth, map.depth[i]);
    std::vector<std::uint8_t> px(map.depth.size(), 0);
    if (max_depth > 0.0f)
        for (std::size_t i = 0; i < map.depth.size(); ++i)
            if (map.coverage[i])
                px[i] = static_cast<std::uint8_t>(
                    std::clamp(255.0f * map.depth[i] / max_depth + 0.5f, 0.0f, 255.0f));
    return px;
}

// Normal preview: n * 0.5 + 0.5 per channel; background maps to black.
inline std::vector<std::uint8_t> normal_preview(const BoneMap& map) {
    std::vector<std::uint8_t> px(map.normal.size(), 0);
    for (std::size_t i = 0; i < map.coverage.size(); ++i) {
        if (!map.coverage[i]) continue;
        for (int c = 0; c < 3; ++c)
            px[i * 3 + c] = static_cast<std::uint8_t>(
                std::clamp(255.0f * (map.normal[i * 3 + c] * 0.5f + 0.5f) + 0.5f, 0.0f, 255.0f));
    }
    return px;
}

}  // namespace bm4d
