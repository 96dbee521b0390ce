// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace regioncomp {

class NoiseStream;

inline constexpr std::size_t kChannels = 3;

/// Row-major H x W x 3 grid of 32-bit reals. Used for noisy latents, clean-image
/// predictions and decoded images alike.
class LatentGrid {
public:
    LatentGrid() = default;
    LatentGrid(std::size_t height, std::size_t width, float fill = 0.0f);
    /// Takes ownership of `data`; throws ShapeError on a length mismatch and
    /// ValidationError on non-finite values.
    LatentGrid(std::size_t height, std::size_t width, std::vector<float> data);

    std::size_t height() const noexcept { return m_height; }
    std::size_t width() const noexcept { return m_width; }
    std::size_t channels() const noexcept { return kChannels; }
    std::size_t size() const noexcept { return m_data.size(); }
    bool empty() const noexcept { return m_data.empty(); }

    float& at(std::size_t row, std::size_t col, std::size_t channel) {
        return m_data[(row * m_width + col) * kChannels + channel];
    }
    float at(std::size_t row, std::size_t col, std::size_t channel) const {
        return m_data[(row * m_width + col) * kChannels + channel];
    }

    std::span<float> pixel(std::size_t row, std::size_t col) {
        return {m_data.data() + (row * m_width + col) * kChannels, kChannels};
    }
    std::span<const float> pixel(std::size_t row, std::size_t col) const {
        return {m_data.data() + (row * m_width + col) * kChannels, kChannels};
    }

    std::span<float> data() noexcept { return m_data; }
    std::span<const float> data() const noexcept { return m_data; }

    bool same_shape(const LatentGrid& other) const noexcept {
        return m_height == other.m_height && m_width == other.m_width;
    }

    bool all_finite() const noexcept;

private:
    std::size_t m_height = 0;
    std::size_t m_width = 0;
    std::vector<float> m_data;
};

/// Byte-level equality, distinguishing +0/-0 and NaN payloads.
bool bit_equal(const LatentGrid& a, const LatentGrid& b) noexcept;

/// Fractional rectangle on the unit canvas.
struct RegionRect {
    double y_offset = 0.0;
    double y_scale = 1.0;
    double x_offset = 0.0;
    double x_scale = 1.0;

    bool operator==(const RegionRect&) const = default;

    static RegionRect full() { return {}; }
};

/// Returns an empty string when `rect` is valid, otherwise the first violated constraint.
std::string rect_violation(const RegionRect& rect);

/// Half-open integer pixel bounds.
struct PixelRect {
    std::size_t row_start = 0;
    std::size_t row_end = 0;
    std::size_t col_start = 0;
    std::size_t col_end = 0;

    std::size_t rows() const noexcept { return row_end - row_start; }
    std::size_t cols() const noexcept { return col_end - col_start; }
    bool contains(std::size_t row, std::size_t col) const noexcept {
        return row >= row_start && row < row_end && col >= col_start && col < col_end;
    }
    bool operator==(const PixelRect&) const = default;

    static PixelRect full(std::size_t height, std::size_t width) { return {0, height, 0, width}; }
};

/// floor() on both edges, at least one pixel per axis.
PixelRect rect_to_pixels(const RegionRect& rect, std::size_t height, std::size_t width);

/// Per-pixel boolean mask.
class Mask {
public:
    Mask() = default;
    Mask(std::size_t height, std::size_t width, bool value = false);

    static Mask from_rect(std::size_t height, std::size_t width, const PixelRect& rect);

    std::size_t height() const noexcept { return m_height; }
    std::size_t width() const noexcept { return m_width; }

    bool get(std::size_t row, std::size_t col) const noexcept { return m_bits[row * m_width + col] != 0; }
    void set(std::size_t row, std::size_t col, bool value) noexcept { m_bits[row * m_width + col] = value ? 1 : 0; }

    std::size_t count() const noexcept;
    bool none() const noexcept { return count() == 0; }
    bool matches(const LatentGrid& grid) const noexcept {
        return m_height == grid.height() && m_width == grid.width();
    }

    bool operator==(const Mask&) const = default;

private:
    std::size_t m_height = 0;
    std::size_t m_width = 0;
    std::vector<std::uint8_t> m_bits;
};

/// `base` with the `rect` window overwritten by `regional`.
LatentGrid replace(const LatentGrid& base, const LatentGrid& regional, const PixelRect& rect);

LatentGrid crop(const LatentGrid& grid, const PixelRect& rect);

/// base*(1-delta) + refined*delta. The endpoints return an input verbatim.
LatentGrid blend(const LatentGrid& base, const LatentGrid& refined, double delta);

/// Copy of `noise` with every masked pixel redrawn from `stream` (row-major, channel-minor).
LatentGrid reinit_masked(const LatentGrid& noise, const Mask& mask, NoiseStream& stream);

/// `edited` inside the mask, `original` elsewhere.
LatentGrid repaint_merge(const LatentGrid& original, const LatentGrid& edited, const Mask& mask);

// Flat snapshot format: "RCLT" magic, then height, width, channels as uint32 LE,
// then row-major float32 LE values.
inline constexpr std::uint32_t kLatentMagic = 0x544C4352u;  // "RCLT" read as LE uint32

std::string encode_latent(const LatentGrid& grid);
LatentGrid decode_latent(std::string_view bytes);
void write_latent_file(const std::string& path, const LatentGrid& grid);
LatentGrid read_latent_file(const std::string& path);

}  // namespace regioncomp
