// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "regioncomp/latent.hpp"
#include "regioncomp/vocab.hpp"

namespace regioncomp {

/// One region of a layout: where it lives, the short prompt used while binding and
/// the richer prompt used while refining.
struct RegionSpec {
    RegionRect rect;
    std::vector<Token> fundamental;  ///< exactly one colour and one pattern
    std::vector<Token> descriptive;  ///< the fundamental tokens plus modifiers
    RegionRect refine_rect;          ///< defaults to `rect`
    bool synthetic = false;          ///< background fill added for uncovered canvas

    Word color() const;
    Word pattern() const;
    /// Modifier words of the descriptive prompt in order.
    std::vector<Word> modifiers() const;

    bool operator==(const RegionSpec&) const = default;
};

struct SceneSpec {
    std::size_t canvas_height = 64;
    std::size_t canvas_width = 64;
    std::vector<RegionSpec> regions;
    std::vector<Token> global_tokens;
    bool global_override = false;
    bool location_hints = true;

    bool operator==(const SceneSpec&) const = default;
};

/// Location word for a rect: dominant axis of the centroid offset from the canvas
/// centre (ties go horizontal); nothing within 0.05 of the centre.
std::optional<Word> location_hint(const RegionRect& rect);

/// Per region: fundamental tokens, then its location word when hints are on.
std::vector<Token> derive_global_prompt(const SceneSpec& scene);

/// Replace/paste order used by the sampler: synthetic background regions first,
/// then user regions in list order (later wins on overlaps).
std::vector<std::size_t> paste_order(const SceneSpec& scene);

/// Checks every region invariant, appends a background region when the layout does
/// not cover the canvas and fills `global_tokens` unless overridden. Throws
/// ValidationError.
void finalize_scene(SceneSpec& scene);

/// Parses a prompt string ("vivid red solid") into region tokens.
/// Throws ValidationError with the offending word in the message.
std::vector<Token> parse_token_list(std::string_view text);

/// Builds a validated region from base/detail prompt strings (detail defaults to base).
RegionSpec make_region(const RegionRect& rect, std::string_view base, std::string_view detail = {});

/// Scene DSL:
///   scene 64x64; hints off; region [y_off,y_scale,x_off,x_scale] base "red solid"
///   detail "vivid red solid" refine [..]; region ...
/// Throws ParseError carrying a line/column for every failure.
SceneSpec parse_scene(std::string_view text);

/// DSL text that parses back to an equal SceneSpec.
std::string scene_to_dsl(const SceneSpec& scene);

/// JSON interchange document (mirrors SceneSpec field for field).
nlohmann::json scene_to_json(const SceneSpec& scene);
/// Throws ValidationError whose path() names the offending field.
SceneSpec scene_from_json(const nlohmann::json& doc);

nlohmann::json rect_json(const RegionRect& rect);
/// Throws ValidationError tagged with `path`.
RegionRect rect_from_json(const nlohmann::json& value, const std::string& path);
/// Accepts a token array or a space-separated string.
std::vector<Token> tokens_from_json(const nlohmann::json& value, const std::string& path);

/// Pretty-printed JSON document.
std::string serialize_scene(const SceneSpec& scene);
SceneSpec parse_scene_document(std::string_view json_text);

}  // namespace regioncomp
