// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "json.hpp"
#include "regioncomp/repaint.hpp"
#include "regioncomp/sampler.hpp"

namespace regioncomp {

nlohmann::json config_to_json(const SamplerConfig& config);

/// Fields present in `doc` override `defaults`. Unknown keys are rejected.
/// Throws ValidationError naming the offending field.
SamplerConfig config_from_json(const nlohmann::json& doc, const SamplerConfig& defaults = {});

/// Rows of '0'/'1' characters.
nlohmann::json mask_to_json(const Mask& mask);
Mask mask_from_json(const nlohmann::json& doc, std::size_t height, std::size_t width, const std::string& path);

/// Request document: {region?, mask_rect?, mask?, base?, detail?, nonce?}.
/// `mask` is validated against the canvas.
RepaintRequest repaint_request_from_json(const nlohmann::json& doc, std::size_t height, std::size_t width);
nlohmann::json repaint_request_to_json(const RepaintRequest& request);

nlohmann::json edit_to_json(const RepaintEdit& edit);
RepaintEdit edit_from_json(const nlohmann::json& doc);

}  // namespace regioncomp
