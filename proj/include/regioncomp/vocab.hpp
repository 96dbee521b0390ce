// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace regioncomp {

enum class TokenKind : std::uint8_t { kColor, kPattern, kModifier, kLocation, kNull };

/// Closed vocabulary. Order is part of the embedding construction; append only.
enum class Word : std::uint8_t {
    kRed,
    kGreen,
    kBlue,
    kYellow,
    kCyan,
    kMagenta,
    kWhite,
    kBlack,
    kSolid,
    kStriped,
    kLight,
    kDark,
    kVivid,
    kLeft,
    kRight,
    kTop,
    kBottom,
    kNull,
};

inline constexpr std::size_t kVocabularySize = 18;
inline constexpr std::size_t kColorCount = 8;

struct Token {
    Word word = Word::kNull;

    TokenKind kind() const noexcept;
    std::string_view lexeme() const noexcept;

    auto operator<=>(const Token&) const = default;
};

using Rgb = std::array<float, 3>;

std::span<const Word> all_words() noexcept;
std::span<const Word> color_words() noexcept;

std::optional<Token> lookup_token(std::string_view lexeme) noexcept;

/// Anchor colour of a colour token.
Rgb anchor_color(Word color);

/// 1 for striped, 0 for solid.
float stripe_flag(Word pattern);

/// light: c + 0.3(1-c); dark: 0.5c; vivid: clamp(0.5 + 1.5(c - 0.5)) to [0,1].
Rgb apply_modifier(Word modifier, Rgb color);

/// Space-separated lexemes.
std::string join_tokens(std::span<const Token> tokens);
std::vector<std::string> token_strings(std::span<const Token> tokens);

/// Human-readable dump of the vocabulary and anchor table.
std::string vocabulary_table();

}  // namespace regioncomp
