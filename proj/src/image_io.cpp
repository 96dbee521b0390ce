// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/image_io.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "regioncomp/error.hpp"

namespace regioncomp {

std::uint8_t quantize(float value) noexcept {
    const float v = std::clamp(value, 0.0f, 1.0f) * 255.0f;
    // Default rounding mode is round-to-nearest-even.
    return static_cast<std::uint8_t>(std::nearbyint(v));
}

Image8 to_image8(const LatentGrid& grid) {
    Image8 out{grid.height(), grid.width(), {}};
    out.rgb.resize(grid.size());
    auto d = grid.data();
    for (std::size_t i = 0; i < d.size(); ++i) out.rgb[i] = quantize(d[i]);
    return out;
}

LatentGrid from_image8(const Image8& image) {
    std::vector<float> data(image.rgb.size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(image.rgb[i]) / 255.0f;
    return LatentGrid(image.height, image.width, std::move(data));
}

LatentGrid clamp01(const LatentGrid& grid) {
    LatentGrid out = grid;
    for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
    return out;
}

std::string encode_ppm(const Image8& image) {
    std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
    return out;
}

namespace {

class PpmReader {
public:
    explicit PpmReader(std::string_view bytes) : m_bytes(bytes) {}

    std::size_t number() {
        skip_space();
        std::size_t v = 0;
        bool any = false;
        while (m_pos < m_bytes.size() && std::isdigit(static_cast<unsigned char>(m_bytes[m_pos]))) {
            v = v * 10 + static_cast<std::size_t>(m_bytes[m_pos++] - '0');
            any = true;
            if (v > 1'000'000) throw ValidationError("ppm: header value too large");
        }
        if (!any) throw ValidationError("ppm: malformed header");
        return v;
    }

    void skip_space() {
        while (m_pos < m_bytes.size()) {
            const char c = m_bytes[m_pos];
            if (c == '#') {
                while (m_pos < m_bytes.size() && m_bytes[m_pos] != '\n') ++m_pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++m_pos;
            } else {
                break;
            }
        }
    }

    std::string_view rest_after_single_space() {
        if (m_pos >= m_bytes.size() || !std::isspace(static_cast<unsigned char>(m_bytes[m_pos]))) {
            throw ValidationError("ppm: malformed header");
        }
        return m_bytes.substr(m_pos + 1);
    }

    std::string_view take(std::size_t n) {
        if (m_bytes.size() - m_pos < n) throw ValidationError("ppm: truncated header");
        auto s = m_bytes.substr(m_pos, n);
        m_pos += n;
        return s;
    }

private:
    std::string_view m_bytes;
    std::size_t m_pos = 0;
};

}  // namespace

Image8 decode_ppm(std::string_view bytes) {
    PpmReader reader(bytes);
    if (reader.take(2) != "P6") throw ValidationError("ppm: expected P6 magic");
    Image8 out;
    out.width = reader.number();
    out.height = reader.number();
    const std::size_t maxval = reader.number();
    if (maxval != 255) throw ValidationError("ppm: only 8-bit images are supported");
    if (out.width == 0 || out.height == 0) throw ValidationError("ppm: empty image");
    const std::string_view pixels = reader.rest_after_single_space();
    const std::size_t need = out.width * out.height * 3;
    if (pixels.size() != need) throw ValidationError("ppm: pixel data length mismatch");
    out.rgb.assign(pixels.begin(), pixels.end());
    return out;
}

namespace {

void png_write_to_string(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::string*>(png_get_io_ptr(png));
    out->append(reinterpret_cast<const char*>(data), length);
}

void png_flush_noop(png_structp) {}

struct PngSource {
    std::string_view bytes;
    std::size_t pos = 0;
};

void png_read_from_view(png_structp png, png_bytep data, png_size_t length) {
    auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
    if (src->bytes.size() - src->pos < length) png_error(png, "truncated png");
    std::memcpy(data, src->bytes.data() + src->pos, length);
    src->pos += length;
}

struct PngErrorSlot {
    char message[256];
};

void png_record_error(png_structp png, png_const_charp message) {
    auto* slot = static_cast<PngErrorSlot*>(png_get_error_ptr(png));
    std::snprintf(slot->message, sizeof slot->message, "%s", message);
    png_longjmp(png, 1);
}

void png_warn_ignore(png_structp, png_const_charp) {}

// The setjmp frames below hold only trivially destructible locals.
bool png_encode_rows(PngErrorSlot* slot, const Image8* image, std::string* out) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, slot, png_record_error, png_warn_ignore);
    if (png == nullptr) return false;
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(png, out, png_write_to_string, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image->width), static_cast<png_uint_32>(image->height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < image->height; ++r) {
        png_write_row(png, const_cast<png_bytep>(image->rgb.data() + r * image->width * 3));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

struct PngDecoded {
    png_uint_32 width;
    png_uint_32 height;
};

bool png_decode_header(png_structp png, png_infop info, PngSource* src, PngDecoded* dims) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_set_read_fn(png, src, png_read_from_view);
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_packing(png);
    png_set_palette_to_rgb(png);
    png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    dims->width = png_get_image_width(png, info);
    dims->height = png_get_image_height(png, info);
    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(dims->width) * 3) {
        png_error(png, "unsupported pixel layout");
    }
    return true;
}

bool png_decode_rows(png_structp png, png_infop info, std::uint8_t* rgb, png_uint_32 width, png_uint_32 height) {
    (void)info;
    if (setjmp(png_jmpbuf(png))) return false;
    for (png_uint_32 r = 0; r < height; ++r) png_read_row(png, rgb + static_cast<std::size_t>(r) * width * 3, nullptr);
    png_read_end(png, nullptr);
    return true;
}

}  // namespace

std::string encode_png(const Image8& image) {
    if (image.rgb.size() != image.height * image.width * 3 || image.rgb.empty()) {
        throw ShapeError("encode_png: pixel buffer does not match dimensions");
    }
    PngErrorSlot slot{"png writer allocation failed"};
    std::string out;
    if (!png_encode_rows(&slot, &image, &out)) throw StorageError(std::string("png: ") + slot.message);
    return out;
}

Image8 decode_png(std::string_view bytes) {
    if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
        throw ValidationError("png: bad signature");
    }
    PngErrorSlot slot{"png reader allocation failed"};
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &slot, png_record_error, png_warn_ignore);
    if (png == nullptr) throw StorageError("png: cannot allocate reader");
    png_infop info = png_create_info_struct(png);
    PngSource src{bytes, 0};
    PngDecoded dims{0, 0};
    Image8 out;
    bool ok = info != nullptr && png_decode_header(png, info, &src, &dims);
    if (ok) {
        if (static_cast<std::uint64_t>(dims.width) * dims.height > (1ull << 26)) {
            png_destroy_read_struct(&png, &info, nullptr);
            throw ValidationError("png: image too large");
        }
        out.width = dims.width;
        out.height = dims.height;
        out.rgb.resize(out.width * out.height * 3);
        ok = png_decode_rows(png, info, out.rgb.data(), dims.width, dims.height);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (!ok) throw ValidationError(std::string("png: ") + slot.message);
    return out;
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw StorageError("cannot open '" + path + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) throw StorageError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw StorageError("cannot open '" + path + "'");
    std::string out((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw StorageError("read of '" + path + "' failed");
    return out;
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw StorageError("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

Image8 contact_sheet(const std::vector<Image8>& tiles, std::size_t columns, std::size_t gap, std::uint8_t border) {
    if (tiles.empty() || columns == 0) throw ValidationError("contact sheet needs at least one tile and column");
    std::size_t th = 0;
    std::size_t tw = 0;
    for (const Image8& t : tiles) {
        th = std::max(th, t.height);
        tw = std::max(tw, t.width);
    }
    const std::size_t cols = std::min(columns, tiles.size());
    const std::size_t rows = (tiles.size() + cols - 1) / cols;
    Image8 out;
    out.height = rows * th + (rows + 1) * gap;
    out.width = cols * tw + (cols + 1) * gap;
    out.rgb.assign(out.height * out.width * 3, border);
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        const Image8& t = tiles[i];
        const std::size_t r0 = gap + (i / cols) * (th + gap);
        const std::size_t c0 = gap + (i % cols) * (tw + gap);
        for (std::size_t r = 0; r < t.height; ++r) {
            std::memcpy(out.rgb.data() + ((r0 + r) * out.width + c0) * 3, t.rgb.data() + r * t.width * 3, t.width * 3);
        }
    }
    return out;
}

}  // namespace regioncomp
