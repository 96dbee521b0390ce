// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "regioncomp/error.hpp"
#include "regioncomp/scene.hpp"
#include "test_util.hpp"

using namespace regioncomp;

namespace {

std::vector<Token> toks(const std::string& s) { return parse_token_list(s); }

ParseError parse_failure(const std::string& text) {
    try {
        parse_scene(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "expected a parse error for: " << text;
    return ParseError("none", {});
}

}  // namespace

TEST(ParseScene, TwoRegionExample) {
    const SceneSpec s = parse_scene(
        "scene 64x64; region [0,1,0,0.5] base \"red solid\" detail \"vivid red solid\"; region [0,1,0.5,0.5] base "
        "\"blue striped\" detail \"blue striped\"");
    ASSERT_EQ(s.regions.size(), 2u);
    EXPECT_EQ(s.canvas_height, 64u);
    EXPECT_EQ(s.regions[0].rect, (RegionRect{0, 1, 0, 0.5}));
    EXPECT_EQ(s.regions[1].rect, (RegionRect{0, 1, 0.5, 0.5}));
    EXPECT_EQ(s.regions[0].fundamental, toks("red solid"));
    EXPECT_EQ(s.regions[0].descriptive, toks("vivid red solid"));
    EXPECT_EQ(s.regions[0].refine_rect, s.regions[0].rect);
    EXPECT_EQ(s.regions[1].color(), Word::kBlue);
    EXPECT_EQ(s.regions[1].pattern(), Word::kStriped);
    EXPECT_EQ(s.regions[0].modifiers(), std::vector<Word>{Word::kVivid});
    EXPECT_FALSE(s.regions[0].synthetic);
}

TEST(ParseScene, SingleRegionFullCanvas) {
    const SceneSpec s = parse_scene("scene 32x32; region [0,1,0,1] base \"green solid\" detail \"green solid\"");
    ASSERT_EQ(s.regions.size(), 1u);
    EXPECT_EQ(s.canvas_width, 32u);
    EXPECT_EQ(s.global_tokens, toks("green solid"));
}

TEST(ParseScene, RectViolationReportsPosition) {
    const ParseError e = parse_failure("scene 64x64; region [0,1.5,0,1] base \"red solid\"");
    EXPECT_EQ(e.detail(), "y_offset+y_scale exceeds 1");
    EXPECT_EQ(e.position().line, 1u);
    EXPECT_EQ(e.position().column, 21u);
    EXPECT_NE(std::string(e.what()).find("line 1, column 21"), std::string::npos);
}

TEST(ParseScene, Errors) {
    struct Case {
        std::string text;
        std::string message;
        std::size_t line;
        std::size_t column;
    };
    const std::vector<Case> cases = {
        {"scene 64x64; region [0,1,0,1] base \"red wobbly\"", "unknown token 'wobbly'", 1, 41},
        {"scene 64x64;\nregion [0,1,0,1] detail \"red solid\"", "missing base clause", 2, 1},
        {"scene 64x64; region [0,1,0,1] base \"red red solid\"", "duplicate color 'red' in base clause", 1, 41},
        {"scene 64x64; region [0,1,0,1] base \"red blue solid\"", "base clause must name exactly one color", 1, 41},
        {"scene 64x64; region [0,1,0,1] base \"red solid left\"", "location tokens are not allowed in region prompts",
         1, 47},
        {"scene 64x64; region [0,1,0,1] base \"red solid\" detail \"blue solid\"",
         "detail clause must repeat the base color and pattern exactly", 1, 56},
        {"region [0,1,0,1] base \"red solid\"", "region before the scene header", 1, 1},
        {"scene 64x64;", "scene has no regions", 1, 13},
        {"scene 0x64; region [0,1,0,1] base \"red solid\"", "canvas size must be between 1x1 and 4096x4096", 1, 7},
        {"scene 64x64; region [0,1,0,1] base \"red solid", "unterminated string", 1, 36},
        {"scene 64x64; region [0,1,0] base \"red solid\"", "expected ','", 1, 27},
        {"scene 64x64; hints maybe; region [0,1,0,1] base \"red solid\"", "expected 'on' or 'off'", 1, 20},
        {"scene 64x64; region [0,1,0,1] base \"red solid\" @", "unexpected character '@'", 1, 48},
    };
    for (const Case& c : cases) {
        const ParseError e = parse_failure(c.text);
        EXPECT_EQ(e.detail(), c.message) << c.text;
        EXPECT_EQ(e.position().line, c.line) << c.text;
        EXPECT_EQ(e.position().column, c.column) << c.text;
    }
}

TEST(ParseScene, ColumnsCountCodePoints) {
    // The comment holds a two-byte character before the offending token on line 2.
    const ParseError e = parse_failure("scene 64x64; # é\nregion [0,1,0,1] base \"red solid\" é");
    EXPECT_EQ(e.position().line, 2u);
    EXPECT_EQ(e.position().column, 35u);
}

TEST(ParseScene, HintsCommentsRefineAndGlobal) {
    const SceneSpec s = parse_scene(
        "# demo\nscene 48x64;\nhints off;\nglobal \"red solid blue solid\";\n"
        "region [0,1,0,0.5] base \"red solid\" refine [0,1,0,0.75];\nregion [0,1,0.5,0.5] base \"blue solid\";");
    EXPECT_FALSE(s.location_hints);
    EXPECT_TRUE(s.global_override);
    EXPECT_EQ(s.global_tokens, toks("red solid blue solid"));
    EXPECT_EQ(s.regions[0].refine_rect, (RegionRect{0, 1, 0, 0.75}));
}

TEST(ParseScene, NeverCrashesOnArbitraryBytes) {
    std::mt19937_64 rng(8);
    const std::string alphabet = "scene 64x[],;\"region base detail refine hints on off red solid 0.5 1 \n#";
    for (int i = 0; i < 500; ++i) {
        std::string text;
        std::uniform_int_distribution<int> len(0, 80), pick(0, static_cast<int>(alphabet.size()) - 1), byte(0, 255);
        const int n = len(rng);
        for (int j = 0; j < n; ++j) {
            text.push_back(j % 7 == 3 ? static_cast<char>(byte(rng)) : alphabet[static_cast<std::size_t>(pick(rng))]);
        }
        try {
            parse_scene(text);
        } catch (const ParseError& e) {
            EXPECT_GE(e.position().line, text.empty() ? 0u : 1u);
        }
    }
}

TEST(DeriveGlobalPrompt, Examples) {
    SceneSpec s = parse_scene(
        "scene 64x64; region [0,1,0,0.5] base \"red solid\"; region [0,1,0.5,0.5] base \"blue striped\"");
    EXPECT_EQ(derive_global_prompt(s), toks("red solid left blue striped right"));
    s.location_hints = false;
    EXPECT_EQ(derive_global_prompt(s), toks("red solid blue striped"));
    const SceneSpec one = parse_scene("scene 64x64; region [0,1,0,1] base \"green striped\"");
    EXPECT_EQ(derive_global_prompt(one), toks("green striped"));
}

TEST(DeriveGlobalPrompt, LocationRules) {
    EXPECT_EQ(location_hint({0, 0.5, 0, 1}), Word::kTop);
    EXPECT_EQ(location_hint({0.5, 0.5, 0, 1}), Word::kBottom);
    EXPECT_EQ(location_hint({0, 0.5, 0, 0.5}), Word::kLeft);  // tie goes horizontal
    EXPECT_EQ(location_hint({0.5, 0.5, 0.5, 0.5}), Word::kRight);
    EXPECT_EQ(location_hint({0.25, 0.5, 0.26, 0.5}), std::nullopt);
}

TEST(DeriveGlobalPrompt, PermutationCovariant) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        SceneSpec s = regioncomp::testing::random_scene(rng);
        SceneSpec p = s;
        std::shuffle(p.regions.begin(), p.regions.end(), rng);
        auto blocks = [](const SceneSpec& scene) {
            std::vector<std::vector<Token>> out;
            for (const RegionSpec& r : scene.regions) {
                SceneSpec single = scene;
                single.regions = {r};
                out.push_back(derive_global_prompt(single));
            }
            return out;
        };
        std::vector<Token> joined;
        for (const auto& b : blocks(p)) joined.insert(joined.end(), b.begin(), b.end());
        ASSERT_EQ(derive_global_prompt(p), joined);
    }
}

TEST(FinalizeScene, SynthesisesBackground) {
    const SceneSpec s = parse_scene("scene 64x64; region [0,1,0,0.5] base \"red solid\"");
    ASSERT_EQ(s.regions.size(), 2u);
    const RegionSpec& bg = s.regions[1];
    EXPECT_TRUE(bg.synthetic);
    EXPECT_EQ(bg.fundamental, toks("white solid"));
    EXPECT_EQ(bg.rect, (RegionRect{0, 1, 0.5, 0.5}));
    EXPECT_EQ(paste_order(s), (std::vector<std::size_t>{1, 0}));
    const std::string doc = serialize_scene(s);
    EXPECT_NE(doc.find("\"synthetic\": true"), std::string::npos);

    SceneSpec again = s;
    finalize_scene(again);
    EXPECT_EQ(again, s);
}

TEST(FinalizeScene, BackgroundIsBoundingBoxOfLeftovers) {
    const SceneSpec s = parse_scene(
        "scene 8x8; region [0,0.5,0,1] base \"red solid\"; region [0.5,0.5,0,0.5] base \"blue solid\"");
    ASSERT_EQ(s.regions.size(), 3u);
    EXPECT_EQ(s.regions[2].rect, (RegionRect{0.5, 0.5, 0.5, 0.5}));
}

TEST(Serialize, RoundTripExampleAndDsl) {
    const SceneSpec s = parse_scene(
        "scene 64x64; region [0,1,0,0.5] base \"red solid\" detail \"vivid red solid\"; region [0,1,0.5,0.5] base "
        "\"blue striped\" detail \"blue striped\"");
    EXPECT_EQ(parse_scene_document(serialize_scene(s)), s);
    EXPECT_EQ(parse_scene(scene_to_dsl(s)), s);
}

TEST(Serialize, RoundTripRandomScenes) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const SceneSpec s = regioncomp::testing::random_scene(rng);
        ASSERT_EQ(parse_scene_document(serialize_scene(s)), s);
        ASSERT_EQ(parse_scene(scene_to_dsl(s)), s);
    }
}

TEST(SceneJson, ErrorsCarryPaths) {
    auto path_of = [](const std::string& text) {
        try {
            parse_scene_document(text);
        } catch (const ValidationError& e) {
            return e.path();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(path_of(R"({"canvas":{"height":64,"width":64},"regions":[{"rect":{"y_offset":0,"y_scale":1.5,)"
                      R"("x_offset":0,"x_scale":1},"base":"red solid"}]})"),
              "regions[0].rect");
    EXPECT_EQ(path_of(R"({"canvas":{"height":64,"width":64},"regions":[{"rect":{"y_offset":0,"y_scale":1,)"
                      R"("x_offset":0,"x_scale":1},"base":["red","plaid"]}]})"),
              "regions[0].base[1]");
    EXPECT_EQ(path_of(R"({"canvas":{"height":64},"regions":[]})"), "canvas");
    EXPECT_EQ(path_of(R"({"canvas":{"height":64,"width":64},"regions":[]})"), "regions");
}

TEST(ParseTokenList, RejectsUnknownWords) {
    EXPECT_EQ(parse_token_list("vivid red solid").size(), 3u);
    try {
        parse_token_list("red plaid");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("plaid"), std::string::npos);
    }
}

TEST(MakeRegion, DetailDefaultsToBase) {
    const RegionSpec r = make_region({0, 1, 0, 1}, "cyan striped");
    EXPECT_EQ(r.descriptive, r.fundamental);
    EXPECT_THROW(make_region({0, 1, 0, 1}, "cyan"), ValidationError);
    EXPECT_THROW(make_region({0, 1, 0, 1}, "dark cyan solid"), ValidationError);
}
