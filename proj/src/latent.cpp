// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/latent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "regioncomp/error.hpp"
#include "regioncomp/rng.hpp"

namespace regioncomp {

namespace {

// Absorbs representation error in fractions like 0.29 * 100 before flooring.
constexpr double kFloorSlack = 1e-9;

std::string shape_string(std::size_t h, std::size_t w) {
    return std::to_string(h) + "x" + std::to_string(w);
}

void require_same_shape(const LatentGrid& a, const LatentGrid& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape " + shape_string(a.height(), a.width()) + " vs " +
                         shape_string(b.height(), b.width()));
    }
}

void require_mask(const Mask& mask, const LatentGrid& grid, const char* op) {
    if (!mask.matches(grid)) {
        throw ShapeError(std::string(op) + ": mask " + shape_string(mask.height(), mask.width()) +
                         " vs grid " + shape_string(grid.height(), grid.width()));
    }
}

void require_inside(const PixelRect& rect, const LatentGrid& grid, const char* op) {
    if (rect.row_start >= rect.row_end || rect.col_start >= rect.col_end || rect.row_end > grid.height() ||
        rect.col_end > grid.width()) {
        throw ShapeError(std::string(op) + ": rect rows [" + std::to_string(rect.row_start) + "," +
                         std::to_string(rect.row_end) + ") cols [" + std::to_string(rect.col_start) + "," +
                         std::to_string(rect.col_end) + ") outside " +
                         shape_string(grid.height(), grid.width()));
    }
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    }
    return v;
}

}  // namespace

LatentGrid::LatentGrid(std::size_t height, std::size_t width, float fill)
    : m_height(height), m_width(width), m_data(height * width * kChannels, fill) {}

LatentGrid::LatentGrid(std::size_t height, std::size_t width, std::vector<float> data)
    : m_height(height), m_width(width), m_data(std::move(data)) {
    if (m_data.size() != height * width * kChannels) {
        throw ShapeError("latent data length " + std::to_string(m_data.size()) + " does not match " +
                         shape_string(height, width) + "x3");
    }
    if (!all_finite()) throw ValidationError("latent data contains non-finite values");
}

bool LatentGrid::all_finite() const noexcept {
    return std::all_of(m_data.begin(), m_data.end(), [](float v) { return std::isfinite(v); });
}

bool bit_equal(const LatentGrid& a, const LatentGrid& b) noexcept {
    return a.same_shape(b) &&
           (a.size() == 0 || std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0);
}

std::string rect_violation(const RegionRect& r) {
    const auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!in_unit(r.y_offset)) return "y_offset must lie in [0,1]";
    if (!in_unit(r.x_offset)) return "x_offset must lie in [0,1]";
    // Scales above 1 are caught by the extent checks below.
    if (!std::isfinite(r.y_scale) || r.y_scale <= 0.0) return "y_scale must be positive";
    if (!std::isfinite(r.x_scale) || r.x_scale <= 0.0) return "x_scale must be positive";
    if (r.y_offset + r.y_scale > 1.0 + kFloorSlack) return "y_offset+y_scale exceeds 1";
    if (r.x_offset + r.x_scale > 1.0 + kFloorSlack) return "x_offset+x_scale exceeds 1";
    return {};
}

PixelRect rect_to_pixels(const RegionRect& rect, std::size_t height, std::size_t width) {
    const auto axis = [](double offset, double scale, std::size_t extent, std::size_t& start, std::size_t& end) {
        const auto n = static_cast<double>(extent);
        start = std::min(extent - 1, static_cast<std::size_t>(std::floor(offset * n + kFloorSlack)));
        end = static_cast<std::size_t>(std::floor((offset + scale) * n + kFloorSlack));
        end = std::clamp(end, start + 1, extent);
    };
    PixelRect out;
    axis(rect.y_offset, rect.y_scale, height, out.row_start, out.row_end);
    axis(rect.x_offset, rect.x_scale, width, out.col_start, out.col_end);
    return out;
}

Mask::Mask(std::size_t height, std::size_t width, bool value)
    : m_height(height), m_width(width), m_bits(height * width, value ? 1 : 0) {}

Mask Mask::from_rect(std::size_t height, std::size_t width, const PixelRect& rect) {
    Mask mask(height, width);
    for (std::size_t r = rect.row_start; r < std::min(rect.row_end, height); ++r) {
        for (std::size_t c = rect.col_start; c < std::min(rect.col_end, width); ++c) mask.set(r, c, true);
    }
    return mask;
}

std::size_t Mask::count() const noexcept {
    return static_cast<std::size_t>(std::count(m_bits.begin(), m_bits.end(), std::uint8_t{1}));
}

LatentGrid replace(const LatentGrid& base, const LatentGrid& regional, const PixelRect& rect) {
    require_inside(rect, base, "replace");
    if (regional.height() != rect.rows() || regional.width() != rect.cols()) {
        throw ShapeError("replace: regional latent " + shape_string(regional.height(), regional.width()) +
                         " does not match rect " + shape_string(rect.rows(), rect.cols()));
    }
    LatentGrid out = base;
    const std::size_t row_bytes = rect.cols() * kChannels;
    for (std::size_t r = 0; r < rect.rows(); ++r) {
        std::copy_n(regional.pixel(r, 0).data(), row_bytes, out.pixel(rect.row_start + r, rect.col_start).data());
    }
    return out;
}

LatentGrid crop(const LatentGrid& grid, const PixelRect& rect) {
    require_inside(rect, grid, "crop");
    LatentGrid out(rect.rows(), rect.cols());
    const std::size_t row_len = rect.cols() * kChannels;
    for (std::size_t r = 0; r < rect.rows(); ++r) {
        std::copy_n(grid.pixel(rect.row_start + r, rect.col_start).data(), row_len, out.pixel(r, 0).data());
    }
    return out;
}

LatentGrid blend(const LatentGrid& base, const LatentGrid& refined, double delta) {
    require_same_shape(base, refined, "blend");
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw ValidationError("blend: delta must lie in [0,1], got " + std::to_string(delta));
    }
    if (delta == 0.0) return base;
    if (delta == 1.0) return refined;
    const float keep = static_cast<float>(1.0 - delta);
    const float take = static_cast<float>(delta);
    LatentGrid out(base.height(), base.width());
    auto dst = out.data();
    auto a = base.data();
    auto b = refined.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = a[i] * keep + b[i] * take;
    return out;
}

LatentGrid reinit_masked(const LatentGrid& noise, const Mask& mask, NoiseStream& stream) {
    require_mask(mask, noise, "reinit_masked");
    LatentGrid out = noise;
    for (std::size_t r = 0; r < noise.height(); ++r) {
        for (std::size_t c = 0; c < noise.width(); ++c) {
            if (!mask.get(r, c)) continue;
            for (float& v : out.pixel(r, c)) v = stream.next_normal();
        }
    }
    return out;
}

LatentGrid repaint_merge(const LatentGrid& original, const LatentGrid& edited, const Mask& mask) {
    require_same_shape(original, edited, "repaint_merge");
    require_mask(mask, original, "repaint_merge");
    LatentGrid out = original;
    for (std::size_t r = 0; r < original.height(); ++r) {
        for (std::size_t c = 0; c < original.width(); ++c) {
            if (mask.get(r, c)) std::ranges::copy(edited.pixel(r, c), out.pixel(r, c).begin());
        }
    }
    return out;
}

std::string encode_latent(const LatentGrid& grid) {
    std::string out;
    out.reserve(16 + grid.size() * 4);
    put_u32(out, kLatentMagic);
    put_u32(out, static_cast<std::uint32_t>(grid.height()));
    put_u32(out, static_cast<std::uint32_t>(grid.width()));
    put_u32(out, static_cast<std::uint32_t>(grid.channels()));
    for (float v : grid.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

LatentGrid decode_latent(std::string_view bytes) {
    if (bytes.size() < 16) throw ShapeError("latent snapshot shorter than its 16-byte header");
    if (get_u32(bytes, 0) != kLatentMagic) throw ValidationError("latent snapshot has a bad magic number");
    const std::size_t h = get_u32(bytes, 4);
    const std::size_t w = get_u32(bytes, 8);
    const std::size_t ch = get_u32(bytes, 12);
    if (ch != kChannels) throw ShapeError("latent snapshot has " + std::to_string(ch) + " channels, expected 3");
    if (bytes.size() != 16 + h * w * ch * 4) throw ShapeError("latent snapshot payload length mismatch");
    std::vector<float> data(h * w * ch);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::bit_cast<float>(get_u32(bytes, 16 + 4 * i));
    return LatentGrid(h, w, std::move(data));
}

void write_latent_file(const std::string& path, const LatentGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    const std::string bytes = encode_latent(grid);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw StorageError("failed to write latent snapshot " + path);
}

LatentGrid read_latent_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("failed to open latent snapshot " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return decode_latent(buffer.str());
}

}  // namespace regioncomp
