// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace regioncomp {

class LatentGrid;

/// Seeded standard-normal source. mt19937_64 bits are fixed by the standard; the
/// normal transform is done here (Box-Muller) because std::normal_distribution
/// output differs between standard library implementations.
class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t seed) : m_engine(seed) {}

    /// Independent stream for the `nonce`-th repaint of a run seeded with `seed`.
    static NoiseStream for_repaint(std::uint64_t seed, std::uint64_t nonce);

    /// Uniform in [0, 1) with 53 random bits.
    double next_uniform();
    float next_normal();

    std::uint64_t next_bits() { return m_engine(); }

private:
    std::mt19937_64 m_engine;
    bool m_has_spare = false;
    double m_spare = 0.0;
};

/// splitmix64 finalizer; used to derive sub-seeds.
std::uint64_t mix_seed(std::uint64_t value);

/// x_T for a run: H x W x 3 standard normals, row-major.
LatentGrid initial_noise(std::size_t height, std::size_t width, std::uint64_t seed);

}  // namespace regioncomp
