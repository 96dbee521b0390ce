// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "regioncomp/error.hpp"
#include "regioncomp/latent.hpp"
#include "regioncomp/rng.hpp"
#include "test_util.hpp"

using namespace regioncomp;
using regioncomp::testing::random_grid;
using regioncomp::testing::random_mask;
using regioncomp::testing::random_pixel_rect;

namespace {

// 1 x n grid whose channel 0 holds `values`, other channels zero.
LatentGrid row_grid(std::vector<float> values) {
    LatentGrid g(1, values.size());
    for (std::size_t c = 0; c < values.size(); ++c) g.at(0, c, 0) = values[c];
    return g;
}

}  // namespace

TEST(LatentGrid, RejectsBadShapesAndNonFinite) {
    EXPECT_THROW(LatentGrid(2, 2, std::vector<float>(11)), ShapeError);
    std::vector<float> v(12, 0.0f);
    v[5] = std::nanf("");
    EXPECT_THROW(LatentGrid(2, 2, v), ValidationError);
    v[5] = INFINITY;
    EXPECT_THROW(LatentGrid(2, 2, v), ValidationError);
    EXPECT_NO_THROW(LatentGrid(2, 2, std::vector<float>(12, 1.0f)));
}

TEST(RectToPixels, Examples) {
    EXPECT_EQ(rect_to_pixels({0.25, 0.5, 0.0, 1.0}, 64, 64), (PixelRect{16, 48, 0, 64}));
    EXPECT_EQ(rect_to_pixels({0.0, 1.0, 0.0, 1.0}, 7, 5), (PixelRect{0, 7, 0, 5}));
    EXPECT_EQ(rect_to_pixels({0.0, 0.01, 0.0, 0.01}, 8, 8), (PixelRect{0, 1, 0, 1}));
}

TEST(RectToPixels, ThirdsTileWithoutGaps) {
    const double third = 1.0 / 3.0;
    const PixelRect a = rect_to_pixels({0, 1, 0, third}, 64, 64);
    const PixelRect b = rect_to_pixels({0, 1, third, third}, 64, 64);
    const PixelRect c = rect_to_pixels({0, 1, 2 * third, 1 - 2 * third}, 64, 64);
    EXPECT_EQ(a.col_end, b.col_start);
    EXPECT_EQ(b.col_end, c.col_start);
    EXPECT_EQ(c.col_end, 64u);
}

TEST(RectViolation, ReportsInvariant) {
    EXPECT_EQ(rect_violation({0, 1.5, 0, 1}), "y_offset+y_scale exceeds 1");
    EXPECT_EQ(rect_violation({0, 1, 0.5, 0.6}), "x_offset+x_scale exceeds 1");
    EXPECT_EQ(rect_violation({0, 0, 0, 1}), "y_scale must be positive");
    EXPECT_EQ(rect_violation({-0.1, 0.5, 0, 1}), "y_offset must lie in [0,1]");
    EXPECT_EQ(rect_violation({0, 1, 0, 1}), "");
}

TEST(Replace, Examples) {
    const LatentGrid out = replace(row_grid({0, 0, 0, 0}), row_grid({5, 5}), {0, 1, 2, 4});
    EXPECT_TRUE(bit_equal(out, row_grid({0, 0, 5, 5})));

    std::mt19937_64 rng(3);
    const LatentGrid base = random_grid(rng, 6, 5);
    const LatentGrid full = random_grid(rng, 6, 5);
    EXPECT_TRUE(bit_equal(replace(base, full, PixelRect::full(6, 5)), full));
}

TEST(Replace, RejectsShapeMismatch) {
    EXPECT_THROW(replace(row_grid({0, 0, 0, 0}), row_grid({5, 5, 5}), {0, 1, 2, 4}), ShapeError);
    EXPECT_THROW(replace(row_grid({0, 0, 0, 0}), row_grid({5, 5}), {0, 1, 3, 5}), ShapeError);
}

TEST(Replace, SequentialOverlapMatchesPerPixelOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const LatentGrid base = random_grid(rng, 9, 7);
        const PixelRect r1 = random_pixel_rect(rng, 9, 7);
        const PixelRect r2 = random_pixel_rect(rng, 9, 7);
        const LatentGrid g1 = random_grid(rng, r1.rows(), r1.cols());
        const LatentGrid g2 = random_grid(rng, r2.rows(), r2.cols());
        const LatentGrid out = replace(replace(base, g1, r1), g2, r2);
        for (std::size_t r = 0; r < 9; ++r) {
            for (std::size_t c = 0; c < 7; ++c) {
                for (std::size_t ch = 0; ch < 3; ++ch) {
                    float expect = base.at(r, c, ch);
                    if (r1.contains(r, c)) expect = g1.at(r - r1.row_start, c - r1.col_start, ch);
                    if (r2.contains(r, c)) expect = g2.at(r - r2.row_start, c - r2.col_start, ch);
                    ASSERT_EQ(out.at(r, c, ch), expect);
                }
            }
        }
    }
}

TEST(Crop, Examples) {
    std::mt19937_64 rng(5);
    const LatentGrid g = random_grid(rng, 4, 6);
    EXPECT_TRUE(bit_equal(crop(g, PixelRect::full(4, 6)), g));
    EXPECT_TRUE(bit_equal(crop(row_grid({1, 2, 3, 4}), {0, 1, 1, 3}), row_grid({2, 3})));
    EXPECT_THROW(crop(g, {0, 5, 0, 6}), ShapeError);
}

TEST(Crop, PasteCropAdjunctionRandom) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> dim(1, 16);
        const std::size_t h = dim(rng), w = dim(rng);
        const LatentGrid x = random_grid(rng, h, w);
        const PixelRect r = random_pixel_rect(rng, h, w);
        const LatentGrid g = random_grid(rng, r.rows(), r.cols());
        ASSERT_TRUE(bit_equal(replace(x, crop(x, r), r), x));
        ASSERT_TRUE(bit_equal(crop(replace(x, g, r), r), g));
    }
}

TEST(Blend, Examples) {
    std::mt19937_64 rng(7);
    const LatentGrid a = random_grid(rng, 5, 5);
    const LatentGrid b = random_grid(rng, 5, 5);
    EXPECT_TRUE(bit_equal(blend(a, b, 0.0), a));
    EXPECT_TRUE(bit_equal(blend(a, b, 1.0), b));
    EXPECT_TRUE(bit_equal(blend(row_grid({1, 1}), row_grid({3, 3}), 0.5), row_grid({2, 2})));
    EXPECT_THROW(blend(a, b, 1.5), ValidationError);
    EXPECT_THROW(blend(a, b, -0.1), ValidationError);
    EXPECT_THROW(blend(a, random_grid(rng, 5, 4), 0.5), ShapeError);
}

TEST(Blend, ConvexityAndEndpointsRandom) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> dd(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const LatentGrid a = random_grid(rng, 6, 6);
        const LatentGrid b = random_grid(rng, 6, 6);
        const double d = dd(rng);
        const LatentGrid out = blend(a, b, d);
        for (std::size_t i = 0; i < out.size(); ++i) {
            ASSERT_GE(out.data()[i], std::min(a.data()[i], b.data()[i]));
            ASSERT_LE(out.data()[i], std::max(a.data()[i], b.data()[i]));
        }
        ASSERT_TRUE(bit_equal(blend(a, b, 0.0), a));
        ASSERT_TRUE(bit_equal(blend(a, b, 1.0), b));
    }
}

TEST(ReinitMasked, Examples) {
    std::mt19937_64 rng(23);
    const LatentGrid noise = random_grid(rng, 8, 8);
    NoiseStream s1(1);
    EXPECT_TRUE(bit_equal(reinit_masked(noise, Mask(8, 8, false), s1), noise));

    const Mask mask = random_mask(rng, 8, 8);
    NoiseStream a(42), b(42);
    const LatentGrid x = reinit_masked(noise, mask, a);
    const LatentGrid y = reinit_masked(noise, mask, b);
    EXPECT_TRUE(bit_equal(x, y));
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
            if (!mask.get(r, c)) {
                for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_EQ(x.at(r, c, ch), noise.at(r, c, ch));
            }
        }
    }
}

TEST(ReinitMasked, DrawsInRowMajorOrder) {
    const LatentGrid noise(2, 3, 9.0f);
    Mask mask(2, 3);
    mask.set(0, 2, true);
    mask.set(1, 0, true);
    NoiseStream stream(5), oracle(5);
    const LatentGrid out = reinit_masked(noise, mask, stream);
    for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_EQ(out.at(0, 2, ch), oracle.next_normal());
    for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_EQ(out.at(1, 0, ch), oracle.next_normal());
}

TEST(ReinitMasked, FullMaskIsStandardNormal) {
    const std::size_t h = 64, w = 64;
    const LatentGrid noise(h, w, 7.0f);
    NoiseStream stream(99);
    const LatentGrid out = reinit_masked(noise, Mask(h, w, true), stream);
    double sum = 0.0, sq = 0.0;
    for (float v : out.data()) {
        sum += v;
        sq += static_cast<double>(v) * v;
    }
    const double n = static_cast<double>(out.size());
    const double mean = sum / n;
    EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(n));
    EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.05);
}

TEST(RepaintMerge, Examples) {
    std::mt19937_64 rng(29);
    const LatentGrid a = random_grid(rng, 4, 4);
    const LatentGrid b = random_grid(rng, 4, 4);
    EXPECT_TRUE(bit_equal(repaint_merge(a, b, Mask(4, 4, false)), a));
    EXPECT_TRUE(bit_equal(repaint_merge(a, b, Mask(4, 4, true)), b));

    Mask checker(4, 4);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) checker.set(r, c, (r + c) % 2 == 1);
    }
    const LatentGrid out = repaint_merge(LatentGrid(4, 4, 1.0f), LatentGrid(4, 4, 2.0f), checker);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(out.at(r, c, 1), (r + c) % 2 == 1 ? 2.0f : 1.0f);
    }
    EXPECT_THROW(repaint_merge(a, b, Mask(3, 4)), ShapeError);
}

TEST(RepaintMerge, IdempotentRandom) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const LatentGrid a = random_grid(rng, 7, 5);
        const LatentGrid b = random_grid(rng, 7, 5);
        const Mask m = random_mask(rng, 7, 5);
        const LatentGrid once = repaint_merge(a, b, m);
        ASSERT_TRUE(bit_equal(repaint_merge(once, b, m), once));
    }
}

TEST(Purity, InputsUntouched) {
    std::mt19937_64 rng(37);
    const LatentGrid a = random_grid(rng, 5, 5);
    const LatentGrid b = random_grid(rng, 5, 5);
    const LatentGrid a0 = a, b0 = b;
    (void)blend(a, b, 0.3);
    (void)replace(a, crop(b, {1, 3, 1, 4}), {1, 3, 1, 4});
    (void)repaint_merge(a, b, random_mask(rng, 5, 5));
    EXPECT_TRUE(bit_equal(a, a0));
    EXPECT_TRUE(bit_equal(b, b0));
}

TEST(LatentFile, RoundTripAndHeader) {
    std::mt19937_64 rng(41);
    const LatentGrid g = random_grid(rng, 3, 5);
    const std::string bytes = encode_latent(g);
    ASSERT_EQ(bytes.size(), 16u + g.size() * 4);
    EXPECT_EQ(bytes.substr(0, 4), "RCLT");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 3u);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 5u);
    EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 3u);
    EXPECT_TRUE(bit_equal(decode_latent(bytes), g));
    EXPECT_THROW(decode_latent(bytes.substr(0, 20)), ShapeError);
    std::string bad = bytes;
    bad[0] = 'X';
    EXPECT_THROW(decode_latent(bad), ValidationError);

    const auto path = std::filesystem::temp_directory_path() / "regioncomp_latent_test.rclt";
    write_latent_file(path.string(), g);
    EXPECT_TRUE(bit_equal(read_latent_file(path.string()), g));
    std::filesystem::remove(path);
}

TEST(MaskFromRect, CountsPixels) {
    const Mask m = Mask::from_rect(8, 8, {2, 5, 1, 3});
    EXPECT_EQ(m.count(), 6u);
    EXPECT_TRUE(m.get(2, 1));
    EXPECT_FALSE(m.get(5, 1));
}
