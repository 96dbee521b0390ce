// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "regioncomp/latent.hpp"

namespace regioncomp {

/// 8-bit RGB raster, row-major.
struct Image8 {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> rgb;

    bool operator==(const Image8&) const = default;
};

/// clamp(v, 0, 1) * 255 rounded half-to-even.
std::uint8_t quantize(float value) noexcept;
Image8 to_image8(const LatentGrid& grid);
/// Exact inverse of quantisation onto the 256-level grid (v / 255).
LatentGrid from_image8(const Image8& image);

/// Display image: every value clamped to [0, 1].
LatentGrid clamp01(const LatentGrid& grid);

std::string encode_ppm(const Image8& image);
Image8 decode_ppm(std::string_view bytes);

std::string encode_png(const Image8& image);
Image8 decode_png(std::string_view bytes);

void write_file(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// Images tiled left to right, top to bottom with a `gap`-pixel border of `border` grey.
Image8 contact_sheet(const std::vector<Image8>& tiles, std::size_t columns, std::size_t gap = 2,
                     std::uint8_t border = 32);

}  // namespace regioncomp
