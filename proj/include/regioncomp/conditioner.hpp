// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "regioncomp/latent.hpp"
#include "regioncomp/vocab.hpp"

namespace regioncomp {

struct ConditionerConfig {
    std::size_t dim = 32;
    float sharpness = 10.0f;  ///< tau: scales location keys and query positions
    std::uint64_t seed = 0x5EED5EEDull;
    /// Gain of the colour-similarity term added to queries when content queries are on.
    float content_gain = 10.0f;

    bool operator==(const ConditionerConfig&) const = default;
};

// Value row layout. Slots past kValuePatternMass are zero padding up to `dim`.
inline constexpr std::size_t kValueRed = 0;
inline constexpr std::size_t kValueStripe = 3;
inline constexpr std::size_t kValueColorMass = 4;
inline constexpr std::size_t kValuePatternMass = 5;
// Key layout: two location slots, then the semantic subspace.
inline constexpr std::size_t kKeyLocationX = 0;
inline constexpr std::size_t kKeyLocationY = 1;
inline constexpr std::size_t kKeySemantic = 2;

/// Deterministic per-token keys and values. Semantic key parts of all non-location
/// tokens are orthonormal (seeded Gram-Schmidt); location keys are (+-tau, 0) / (0, +-tau).
class EmbeddingTable {
public:
    explicit EmbeddingTable(const ConditionerConfig& config = {});

    std::size_t dim() const noexcept { return m_config.dim; }
    float sharpness() const noexcept { return m_config.sharpness; }
    const ConditionerConfig& config() const noexcept { return m_config; }

    std::span<const float> key(Word word) const;
    std::span<const float> value(Word word) const;

private:
    ConditionerConfig m_config;
    std::vector<float> m_keys;
    std::vector<float> m_values;
};

struct ModifierApplication {
    std::size_t color_index;  ///< index of the colour token in the prompt
    Word modifier;
};

/// Keys/values of a prompt. Tokens are grouped into phrases (a new phrase starts at
/// a second colour, at a modifier after a complete colour+pattern pair, or after a
/// location word). A phrase's location key is added to every key in the phrase, and
/// its modifiers are applied to its colour values in order.
struct PromptEncoding {
    std::vector<Token> tokens;
    std::vector<float> keys;    ///< tokens.size() x dim
    std::vector<float> values;  ///< tokens.size() x dim
    std::vector<std::size_t> phrase_of;
    std::vector<ModifierApplication> modifiers;
    std::size_t dim = 0;

    std::size_t size() const noexcept { return tokens.size(); }
    std::span<const float> key(std::size_t i) const { return {keys.data() + i * dim, dim}; }
    std::span<const float> value(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

PromptEncoding encode_prompt(const EmbeddingTable& table, std::span<const Token> tokens);

/// Per-pixel queries over a window of the canvas.
class QueryField {
public:
    /// Positional queries: (x_norm - 0.5, y_norm - 0.5) * tau at pixel centres, in
    /// canvas coordinates, zero elsewhere.
    QueryField(const EmbeddingTable& table, std::size_t canvas_height, std::size_t canvas_width,
               const PixelRect& window);

    /// Positional queries plus a colour-similarity term read from `latent` (window-sized).
    static QueryField with_content(const EmbeddingTable& table, std::size_t canvas_height, std::size_t canvas_width,
                                   const PixelRect& window, const LatentGrid& latent);

    std::size_t rows() const noexcept { return m_window.rows(); }
    std::size_t cols() const noexcept { return m_window.cols(); }
    std::size_t dim() const noexcept { return m_dim; }
    const PixelRect& window() const noexcept { return m_window; }

    std::span<const float> query(std::size_t row, std::size_t col) const {
        return {m_data.data() + (row * cols() + col) * m_dim, m_dim};
    }

private:
    PixelRect m_window;
    std::size_t m_dim = 0;
    std::vector<float> m_data;
};

/// Attended value rows, one `dim`-wide row per pixel of the window.
struct ValueField {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t dim = 0;
    std::vector<float> data;

    std::span<const float> at(std::size_t row, std::size_t col) const {
        return {data.data() + (row * cols + col) * dim, dim};
    }
};

/// softmax(q . K^T / sqrt(dim_k)) . V for one query; max-subtracted, summed in token
/// order. `scratch` must hold one entry per key row.
void attend(std::span<const float> query, std::span<const float> keys, std::span<const float> values,
            std::size_t dim_k, std::size_t dim_v, std::span<float> out, std::span<double> scratch);

/// Throws ValidationError on an empty prompt.
ValueField cross_attention(const QueryField& queries, const PromptEncoding& encoding, unsigned threads = 1);

/// Band index 0/1 alternating every four canvas rows.
inline bool stripe_row(std::size_t canvas_row) noexcept { return (canvas_row / 4) % 2 == 1; }

struct ConditionerOptions {
    bool content_queries = false;
    unsigned threads = 1;
};

/// The toy network: clean-image prediction from cross-attention over a prompt.
class Conditioner {
public:
    explicit Conditioner(const ConditionerConfig& config = {}, ConditionerOptions options = {});

    const EmbeddingTable& table() const noexcept { return m_table; }
    const ConditionerOptions& options() const noexcept { return m_options; }

    PromptEncoding encode(std::span<const Token> tokens) const { return encode_prompt(m_table, tokens); }
    PromptEncoding encode_null() const;

    /// Clean-image prediction for the `window` of a canvas. `latent` is window-sized and
    /// only read when content queries are enabled. rgb = attended colour / colour mass,
    /// scaled by (1 - 0.5 * stripe) on stripe rows.
    LatentGrid predict_x0(const LatentGrid& latent, double t, const PromptEncoding& encoding,
                          const PixelRect& window, std::size_t canvas_height, std::size_t canvas_width) const;

private:
    EmbeddingTable m_table;
    ConditionerOptions m_options;
};

inline constexpr float kGuidanceMin = -0.25f;
inline constexpr float kGuidanceMax = 1.25f;

/// uncond + s * (cond - uncond), clamped to [-0.25, 1.25]. s = 0 and s = 1 return
/// the corresponding input (clamped) exactly.
LatentGrid guide(const LatentGrid& cond, const LatentGrid& uncond, double scale);

}  // namespace regioncomp
