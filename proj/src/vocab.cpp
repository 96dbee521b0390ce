// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/vocab.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace regioncomp {

namespace {

struct WordInfo {
    Word word;
    TokenKind kind;
    std::string_view lexeme;
};

constexpr std::array<WordInfo, kVocabularySize> kWords{{
    {Word::kRed, TokenKind::kColor, "red"},
    {Word::kGreen, TokenKind::kColor, "green"},
    {Word::kBlue, TokenKind::kColor, "blue"},
    {Word::kYellow, TokenKind::kColor, "yellow"},
    {Word::kCyan, TokenKind::kColor, "cyan"},
    {Word::kMagenta, TokenKind::kColor, "magenta"},
    {Word::kWhite, TokenKind::kColor, "white"},
    {Word::kBlack, TokenKind::kColor, "black"},
    {Word::kSolid, TokenKind::kPattern, "solid"},
    {Word::kStriped, TokenKind::kPattern, "striped"},
    {Word::kLight, TokenKind::kModifier, "light"},
    {Word::kDark, TokenKind::kModifier, "dark"},
    {Word::kVivid, TokenKind::kModifier, "vivid"},
    {Word::kLeft, TokenKind::kLocation, "left"},
    {Word::kRight, TokenKind::kLocation, "right"},
    {Word::kTop, TokenKind::kLocation, "top"},
    {Word::kBottom, TokenKind::kLocation, "bottom"},
    {Word::kNull, TokenKind::kNull, "\xE2\x88\x85"},  // U+2205 EMPTY SET
}};

constexpr std::array<Word, kVocabularySize> kAllWords = [] {
    std::array<Word, kVocabularySize> out{};
    for (std::size_t i = 0; i < kVocabularySize; ++i) out[i] = kWords[i].word;
    return out;
}();

constexpr std::array<Word, kColorCount> kColorWords{Word::kRed,  Word::kGreen,   Word::kBlue,  Word::kYellow,
                                                    Word::kCyan, Word::kMagenta, Word::kWhite, Word::kBlack};

const WordInfo& info(Word word) { return kWords[static_cast<std::size_t>(word)]; }

}  // namespace

TokenKind Token::kind() const noexcept { return info(word).kind; }

std::string_view Token::lexeme() const noexcept { return info(word).lexeme; }

std::span<const Word> all_words() noexcept { return kAllWords; }

std::span<const Word> color_words() noexcept { return kColorWords; }

std::optional<Token> lookup_token(std::string_view lexeme) noexcept {
    for (const auto& w : kWords) {
        if (w.lexeme == lexeme) return Token{w.word};
    }
    return std::nullopt;
}

Rgb anchor_color(Word color) {
    switch (color) {
        case Word::kRed: return {1.0f, 0.0f, 0.0f};
        case Word::kGreen: return {0.0f, 1.0f, 0.0f};
        case Word::kBlue: return {0.0f, 0.0f, 1.0f};
        case Word::kYellow: return {1.0f, 1.0f, 0.0f};
        case Word::kCyan: return {0.0f, 1.0f, 1.0f};
        case Word::kMagenta: return {1.0f, 0.0f, 1.0f};
        case Word::kWhite: return {1.0f, 1.0f, 1.0f};
        case Word::kBlack: return {0.0f, 0.0f, 0.0f};
        default: throw std::invalid_argument("anchor_color: not a colour token");
    }
}

float stripe_flag(Word pattern) {
    switch (pattern) {
        case Word::kSolid: return 0.0f;
        case Word::kStriped: return 1.0f;
        default: throw std::invalid_argument("stripe_flag: not a pattern token");
    }
}

Rgb apply_modifier(Word modifier, Rgb color) {
    for (float& c : color) {
        switch (modifier) {
            case Word::kLight: c = c + 0.3f * (1.0f - c); break;
            case Word::kDark: c = 0.5f * c; break;
            case Word::kVivid: c = std::clamp(0.5f + 1.5f * (c - 0.5f), 0.0f, 1.0f); break;
            default: throw std::invalid_argument("apply_modifier: not a modifier token");
        }
    }
    return color;
}

std::string join_tokens(std::span<const Token> tokens) {
    std::string out;
    for (const Token& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out.append(t.lexeme());
    }
    return out;
}

std::vector<std::string> token_strings(std::span<const Token> tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const Token& t : tokens) out.emplace_back(t.lexeme());
    return out;
}

std::string vocabulary_table() {
    static constexpr std::array<std::string_view, 5> kKindNames{"color", "pattern", "modifier", "location", "null"};
    std::ostringstream out;
    out << "# kind      lexeme    value\n";
    for (const auto& w : kWords) {
        out << kKindNames[static_cast<std::size_t>(w.kind)];
        out << std::string(10 - kKindNames[static_cast<std::size_t>(w.kind)].size(), ' ') << ' ' << w.lexeme;
        if (w.kind == TokenKind::kColor) {
            const Rgb c = anchor_color(w.word);
            out << "  rgb=(" << c[0] << ", " << c[1] << ", " << c[2] << ")";
        } else if (w.kind == TokenKind::kPattern) {
            out << "  stripe=" << stripe_flag(w.word);
        } else if (w.word == Word::kLight) {
            out << "  c -> c + 0.3(1 - c)";
        } else if (w.word == Word::kDark) {
            out << "  c -> 0.5c";
        } else if (w.word == Word::kVivid) {
            out << "  c -> clamp(0.5 + 1.5(c - 0.5), 0, 1)";
        } else if (w.kind == TokenKind::kNull) {
            out << "  rgb=(0.5, 0.5, 0.5) stripe=0";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace regioncomp
