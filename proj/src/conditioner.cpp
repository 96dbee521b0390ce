// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/conditioner.hpp"

#include <algorithm>
#include <cmath>

#include "regioncomp/error.hpp"
#include "regioncomp/parallel.hpp"
#include "regioncomp/rng.hpp"

namespace regioncomp {

namespace {

std::size_t word_index(Word w) { return static_cast<std::size_t>(w); }

bool is_location(Word w) { return Token{w}.kind() == TokenKind::kLocation; }

}  // namespace

EmbeddingTable::EmbeddingTable(const ConditionerConfig& config)
    : m_config(config),
      m_keys(kVocabularySize * config.dim, 0.0f),
      m_values(kVocabularySize * config.dim, 0.0f) {
    const std::size_t d = config.dim;
    std::size_t semantic_tokens = 0;
    for (Word w : all_words()) semantic_tokens += is_location(w) ? 0 : 1;
    if (d < kValuePatternMass + 1 || d - kKeySemantic < semantic_tokens) {
        throw ValidationError("embedding dim must be at least " + std::to_string(kKeySemantic + semantic_tokens));
    }
    if (!(config.sharpness > 0.0f) || !std::isfinite(config.sharpness)) {
        throw ValidationError("attention sharpness must be positive");
    }

    // Gram-Schmidt over seeded Gaussian draws in the semantic subspace.
    const std::size_t sd = d - kKeySemantic;
    NoiseStream stream(config.seed);
    std::vector<std::vector<double>> basis;
    for (Word w : all_words()) {
        if (is_location(w)) continue;
        std::vector<double> v(sd);
        for (;;) {
            for (double& x : v) x = stream.next_normal();
            for (const auto& b : basis) {
                double dot = 0.0;
                for (std::size_t i = 0; i < sd; ++i) dot += v[i] * b[i];
                for (std::size_t i = 0; i < sd; ++i) v[i] -= dot * b[i];
            }
            double norm = 0.0;
            for (double x : v) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (double& x : v) x /= norm;
                break;
            }
        }
        basis.push_back(v);
        float* key = m_keys.data() + word_index(w) * d;
        for (std::size_t i = 0; i < sd; ++i) key[kKeySemantic + i] = static_cast<float>(v[i]);
    }

    const float tau = config.sharpness;
    const auto set_loc = [&](Word w, float x, float y) {
        m_keys[word_index(w) * d + kKeyLocationX] = x * tau;
        m_keys[word_index(w) * d + kKeyLocationY] = y * tau;
    };
    set_loc(Word::kLeft, -1.0f, 0.0f);
    set_loc(Word::kRight, 1.0f, 0.0f);
    set_loc(Word::kTop, 0.0f, -1.0f);
    set_loc(Word::kBottom, 0.0f, 1.0f);

    for (Word w : all_words()) {
        float* value = m_values.data() + word_index(w) * d;
        const Token t{w};
        if (t.kind() == TokenKind::kColor) {
            const Rgb c = anchor_color(w);
            std::copy(c.begin(), c.end(), value + kValueRed);
            value[kValueColorMass] = 1.0f;
        } else if (t.kind() == TokenKind::kPattern) {
            value[kValueStripe] = stripe_flag(w);
            value[kValuePatternMass] = 1.0f;
        } else if (t.kind() == TokenKind::kNull) {
            value[kValueRed + 0] = value[kValueRed + 1] = value[kValueRed + 2] = 0.5f;
            value[kValueColorMass] = 1.0f;
            value[kValuePatternMass] = 1.0f;
        }
    }
}

std::span<const float> EmbeddingTable::key(Word word) const {
    return {m_keys.data() + word_index(word) * m_config.dim, m_config.dim};
}

std::span<const float> EmbeddingTable::value(Word word) const {
    return {m_values.data() + word_index(word) * m_config.dim, m_config.dim};
}

PromptEncoding encode_prompt(const EmbeddingTable& table, std::span<const Token> tokens) {
    PromptEncoding enc;
    enc.dim = table.dim();
    enc.tokens.assign(tokens.begin(), tokens.end());
    const std::size_t n = tokens.size();
    const std::size_t d = enc.dim;
    enc.keys.resize(n * d);
    enc.values.resize(n * d);
    enc.phrase_of.resize(n);

    std::size_t phrase = 0;
    bool has_color = false;
    bool has_pattern = false;
    bool closed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const TokenKind kind = tokens[i].kind();
        const bool starts_new = i > 0 && (closed || (kind == TokenKind::kColor && has_color) ||
                                          (kind == TokenKind::kModifier && has_color && has_pattern));
        if (starts_new) {
            ++phrase;
            has_color = has_pattern = closed = false;
        }
        enc.phrase_of[i] = phrase;
        has_color = has_color || kind == TokenKind::kColor;
        has_pattern = has_pattern || kind == TokenKind::kPattern;
        closed = kind == TokenKind::kLocation;
        const auto k = table.key(tokens[i].word);
        const auto v = table.value(tokens[i].word);
        std::ranges::copy(k, enc.keys.begin() + static_cast<std::ptrdiff_t>(i * d));
        std::ranges::copy(v, enc.values.begin() + static_cast<std::ptrdiff_t>(i * d));
    }

    const std::size_t phrases = n == 0 ? 0 : phrase + 1;
    for (std::size_t p = 0; p < phrases; ++p) {
        float loc_x = 0.0f;
        float loc_y = 0.0f;
        for (std::size_t i = 0; i < n; ++i) {
            if (enc.phrase_of[i] != p || tokens[i].kind() != TokenKind::kLocation) continue;
            loc_x += table.key(tokens[i].word)[kKeyLocationX];
            loc_y += table.key(tokens[i].word)[kKeyLocationY];
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (enc.phrase_of[i] != p || tokens[i].kind() == TokenKind::kLocation) continue;
            enc.keys[i * d + kKeyLocationX] += loc_x;
            enc.keys[i * d + kKeyLocationY] += loc_y;
        }
        for (std::size_t m = 0; m < n; ++m) {
            if (enc.phrase_of[m] != p || tokens[m].kind() != TokenKind::kModifier) continue;
            for (std::size_t c = 0; c < n; ++c) {
                if (enc.phrase_of[c] != p || tokens[c].kind() != TokenKind::kColor) continue;
                float* value = enc.values.data() + c * d + kValueRed;
                const Rgb out = apply_modifier(tokens[m].word, Rgb{value[0], value[1], value[2]});
                std::copy(out.begin(), out.end(), value);
                enc.modifiers.push_back({c, tokens[m].word});
            }
        }
    }
    return enc;
}

QueryField::QueryField(const EmbeddingTable& table, std::size_t canvas_height, std::size_t canvas_width,
                       const PixelRect& window)
    : m_window(window), m_dim(table.dim()), m_data(window.rows() * window.cols() * table.dim(), 0.0f) {
    const float tau = table.sharpness();
    for (std::size_t r = 0; r < rows(); ++r) {
        const double y = (static_cast<double>(window.row_start + r) + 0.5) / static_cast<double>(canvas_height);
        for (std::size_t c = 0; c < cols(); ++c) {
            const double x = (static_cast<double>(window.col_start + c) + 0.5) / static_cast<double>(canvas_width);
            float* q = m_data.data() + (r * cols() + c) * m_dim;
            q[kKeyLocationX] = static_cast<float>(x - 0.5) * tau;
            q[kKeyLocationY] = static_cast<float>(y - 0.5) * tau;
        }
    }
}

QueryField QueryField::with_content(const EmbeddingTable& table, std::size_t canvas_height,
                                    std::size_t canvas_width, const PixelRect& window, const LatentGrid& latent) {
    if (latent.height() != window.rows() || latent.width() != window.cols()) {
        throw ShapeError("content queries: latent does not match the query window");
    }
    QueryField field(table, canvas_height, canvas_width, window);
    const float gain = table.config().content_gain;
    for (std::size_t r = 0; r < field.rows(); ++r) {
        for (std::size_t c = 0; c < field.cols(); ++c) {
            float* q = field.m_data.data() + (r * field.cols() + c) * field.m_dim;
            const auto px = latent.pixel(r, c);
            for (Word w : color_words()) {
                const Rgb a = anchor_color(w);
                float dist2 = 0.0f;
                for (std::size_t ch = 0; ch < kChannels; ++ch) {
                    const float diff = std::clamp(px[ch], 0.0f, 1.0f) - a[ch];
                    dist2 += diff * diff;
                }
                const float similarity = gain * (1.0f - dist2 / 3.0f);
                const auto k = table.key(w);
                for (std::size_t i = kKeySemantic; i < field.m_dim; ++i) q[i] += similarity * k[i];
            }
        }
    }
    return field;
}

void attend(std::span<const float> query, std::span<const float> keys, std::span<const float> values,
            std::size_t dim_k, std::size_t dim_v, std::span<float> out, std::span<double> scratch) {
    const std::size_t n = keys.size() / dim_k;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim_k));
    double max_logit = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim_k; ++i) dot += static_cast<double>(query[i]) * keys[j * dim_k + i];
        scratch[j] = dot * scale;
        max_logit = std::max(max_logit, scratch[j]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        scratch[j] = std::exp(scratch[j] - max_logit);
        total += scratch[j];
    }
    for (std::size_t i = 0; i < dim_v; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += scratch[j] * values[j * dim_v + i];
        out[i] = static_cast<float>(acc / total);
    }
}

ValueField cross_attention(const QueryField& queries, const PromptEncoding& encoding, unsigned threads) {
    if (encoding.size() == 0) throw ValidationError("cross_attention: prompt has no tokens");
    if (encoding.dim != queries.dim()) throw ShapeError("cross_attention: query and key widths differ");
    ValueField field{queries.rows(), queries.cols(), encoding.dim, {}};
    field.data.resize(field.rows * field.cols * field.dim);
    parallel_for(field.rows, threads, [&](std::size_t r) {
        std::vector<double> scratch(encoding.size());
        for (std::size_t c = 0; c < field.cols; ++c) {
            std::span<float> out(field.data.data() + (r * field.cols + c) * field.dim, field.dim);
            attend(queries.query(r, c), encoding.keys, encoding.values, encoding.dim, encoding.dim, out, scratch);
        }
    });
    return field;
}

Conditioner::Conditioner(const ConditionerConfig& config, ConditionerOptions options)
    : m_table(config), m_options(options) {}

PromptEncoding Conditioner::encode_null() const {
    const Token null_token{Word::kNull};
    return encode_prompt(m_table, std::span<const Token>(&null_token, 1));
}

LatentGrid Conditioner::predict_x0(const LatentGrid& latent, double t, const PromptEncoding& encoding,
                                   const PixelRect& window, std::size_t canvas_height,
                                   std::size_t canvas_width) const {
    if (!(t > 0.0 && t <= 1.0)) throw ValidationError("predict_x0: t must lie in (0,1]");
    if (window.row_end > canvas_height || window.col_end > canvas_width || window.rows() == 0 || window.cols() == 0) {
        throw ShapeError("predict_x0: window outside the canvas");
    }
    const QueryField queries = m_options.content_queries
                                   ? QueryField::with_content(m_table, canvas_height, canvas_width, window, latent)
                                   : QueryField(m_table, canvas_height, canvas_width, window);
    const ValueField attended = cross_attention(queries, encoding, m_options.threads);

    LatentGrid out(window.rows(), window.cols());
    for (std::size_t r = 0; r < window.rows(); ++r) {
        const bool stripe_band = stripe_row(window.row_start + r);
        for (std::size_t c = 0; c < window.cols(); ++c) {
            const auto v = attended.at(r, c);
            const float color_mass = v[kValueColorMass];
            const float pattern_mass = v[kValuePatternMass];
            const float stripe = pattern_mass > 0.0f ? v[kValueStripe] / pattern_mass : 0.0f;
            const float modulation = stripe_band ? 1.0f - 0.5f * stripe : 1.0f;
            auto px = out.pixel(r, c);
            for (std::size_t ch = 0; ch < kChannels; ++ch) {
                const float rgb = color_mass > 0.0f ? v[kValueRed + ch] / color_mass : 0.5f;
                px[ch] = rgb * modulation;
            }
        }
    }
    return out;
}

LatentGrid guide(const LatentGrid& cond, const LatentGrid& uncond, double scale) {
    if (!cond.same_shape(uncond)) throw ShapeError("guide: cond and uncond shapes differ");
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw ValidationError("guide: scale must be non-negative");
    LatentGrid out(cond.height(), cond.width());
    auto dst = out.data();
    auto c = cond.data();
    auto u = uncond.data();
    const float s = static_cast<float>(scale);
    for (std::size_t i = 0; i < dst.size(); ++i) {
        float v;
        if (scale == 1.0) {
            v = c[i];
        } else if (scale == 0.0) {
            v = u[i];
        } else {
            v = u[i] + s * (c[i] - u[i]);
        }
        dst[i] = std::clamp(v, kGuidanceMin, kGuidanceMax);
    }
    return out;
}

}  // namespace regioncomp
