// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/rng.hpp"

#include <cmath>
#include <numbers>

#include "regioncomp/latent.hpp"

namespace regioncomp {

std::uint64_t mix_seed(std::uint64_t value) {
    value += 0x9E3779B97F4A7C15ull;
    value = (value ^ (value >> 30)) * 0xBF58476D1CE4E5B9ull;
    value = (value ^ (value >> 27)) * 0x94D049BB133111EBull;
    return value ^ (value >> 31);
}

NoiseStream NoiseStream::for_repaint(std::uint64_t seed, std::uint64_t nonce) {
    return NoiseStream(mix_seed(mix_seed(seed) ^ mix_seed(0x52455041494E54ull + nonce)));
}

double NoiseStream::next_uniform() {
    return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
}

float NoiseStream::next_normal() {
    if (m_has_spare) {
        m_has_spare = false;
        return static_cast<float>(m_spare);
    }
    const double u1 = 1.0 - next_uniform();  // (0, 1]
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    m_spare = radius * std::sin(angle);
    m_has_spare = true;
    return static_cast<float>(radius * std::cos(angle));
}

LatentGrid initial_noise(std::size_t height, std::size_t width, std::uint64_t seed) {
    NoiseStream stream(seed);
    LatentGrid out(height, width);
    for (float& v : out.data()) v = stream.next_normal();
    return out;
}

}  // namespace regioncomp
