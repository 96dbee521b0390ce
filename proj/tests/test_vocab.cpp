// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "regioncomp/vocab.hpp"

using namespace regioncomp;

TEST(Vocab, LookupCoversClosedVocabulary) {
    const std::vector<std::pair<std::string, TokenKind>> expected = {
        {"red", TokenKind::kColor},      {"green", TokenKind::kColor},   {"blue", TokenKind::kColor},
        {"yellow", TokenKind::kColor},   {"cyan", TokenKind::kColor},    {"magenta", TokenKind::kColor},
        {"white", TokenKind::kColor},    {"black", TokenKind::kColor},   {"solid", TokenKind::kPattern},
        {"striped", TokenKind::kPattern}, {"light", TokenKind::kModifier}, {"dark", TokenKind::kModifier},
        {"vivid", TokenKind::kModifier}, {"left", TokenKind::kLocation},  {"right", TokenKind::kLocation},
        {"top", TokenKind::kLocation},   {"bottom", TokenKind::kLocation}, {"\xE2\x88\x85", TokenKind::kNull},
    };
    ASSERT_EQ(all_words().size(), expected.size());
    for (const auto& [lexeme, kind] : expected) {
        const auto t = lookup_token(lexeme);
        ASSERT_TRUE(t.has_value()) << lexeme;
        EXPECT_EQ(t->kind(), kind);
        EXPECT_EQ(t->lexeme(), lexeme);
    }
    EXPECT_FALSE(lookup_token("purple"));
    EXPECT_FALSE(lookup_token("Red"));
    EXPECT_FALSE(lookup_token(""));
}

TEST(Vocab, ModifierFormulas) {
    const Rgb c{0.2f, 0.5f, 0.9f};
    const Rgb light = apply_modifier(Word::kLight, c);
    const Rgb dark = apply_modifier(Word::kDark, c);
    const Rgb vivid = apply_modifier(Word::kVivid, c);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_FLOAT_EQ(light[i], c[i] + 0.3f * (1.0f - c[i]));
        EXPECT_FLOAT_EQ(dark[i], 0.5f * c[i]);
        EXPECT_FLOAT_EQ(vivid[i], std::clamp(0.5f + 1.5f * (c[i] - 0.5f), 0.0f, 1.0f));
    }
    EXPECT_THROW(apply_modifier(Word::kRed, c), std::invalid_argument);
}

TEST(Vocab, ModifiersKeepColorsInUnitBox) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> d(0.0f, 1.0f);
    for (int i = 0; i < 100; ++i) {
        const Rgb c{d(rng), d(rng), d(rng)};
        for (Word m : {Word::kLight, Word::kDark, Word::kVivid}) {
            for (float v : apply_modifier(m, c)) {
                ASSERT_GE(v, 0.0f);
                ASSERT_LE(v, 1.0f);
            }
        }
    }
}

TEST(Vocab, AnchorsAndStripes) {
    EXPECT_EQ(anchor_color(Word::kRed), (Rgb{1, 0, 0}));
    EXPECT_EQ(anchor_color(Word::kCyan), (Rgb{0, 1, 1}));
    EXPECT_EQ(anchor_color(Word::kBlack), (Rgb{0, 0, 0}));
    EXPECT_EQ(stripe_flag(Word::kSolid), 0.0f);
    EXPECT_EQ(stripe_flag(Word::kStriped), 1.0f);
    EXPECT_THROW(anchor_color(Word::kSolid), std::invalid_argument);
}

TEST(Vocab, TableListsEveryLexeme) {
    const std::string table = vocabulary_table();
    for (Word w : all_words()) EXPECT_NE(table.find(Token{w}.lexeme()), std::string::npos);
}

TEST(Vocab, JoinTokens) {
    const std::vector<Token> t{Token{Word::kVivid}, Token{Word::kRed}, Token{Word::kSolid}};
    EXPECT_EQ(join_tokens(t), "vivid red solid");
    EXPECT_EQ(token_strings(t), (std::vector<std::string>{"vivid", "red", "solid"}));
}
