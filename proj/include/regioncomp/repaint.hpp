// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regioncomp/latent.hpp"
#include "regioncomp/sampler.hpp"
#include "regioncomp/scene.hpp"

namespace regioncomp {

/// What to repaint and how. At least one of `region`, `mask_rect` or `mask` names the
/// target; `base`/`detail` replace the target region's prompts.
struct RepaintRequest {
    std::optional<std::size_t> region;
    std::optional<RegionRect> mask_rect;
    std::optional<Mask> mask;
    std::optional<std::vector<Token>> base;
    std::optional<std::vector<Token>> detail;
    std::optional<std::uint64_t> nonce;  ///< 1 when unset
};

/// A resolved repaint: the edited scene, the pixel mask and the noise nonce.
struct RepaintEdit {
    SceneSpec scene;
    Mask mask;
    std::uint64_t nonce = 1;

    bool operator==(const RepaintEdit&) const = default;
};

/// Edited scene and mask for `request` against `scene`. The mask is the region's pixel
/// rect for a region target, else the explicit mask. With a mask rect and new tokens
/// but no region index the edit is appended as a new region over the mask rect.
/// Throws ValidationError.
RepaintEdit apply_edit(const SceneSpec& scene, const RepaintRequest& request);

/// A root generation plus the repaints applied on top of it, oldest first.
struct Lineage {
    SceneSpec scene;
    SamplerConfig config;
    std::vector<RepaintEdit> edits;

    /// Scene of the newest run in the chain.
    const SceneSpec& current_scene() const { return edits.empty() ? scene : edits.back().scene; }
};

/// Replays the chain: every edit's sampler starts from its own re-initialised noise and
/// all runs advance in lockstep; after each step the root latent takes each edit's
/// masked pixels, oldest edit first.
Trajectory replay(const Lineage& lineage, const StepObserver& observer = {});

struct RepaintResult {
    Lineage lineage;  ///< `base` with the new edit appended (unchanged for empty masks)
    Trajectory trajectory;
    std::vector<std::string> warnings;
};

RepaintResult repaint(const Lineage& base, const RepaintRequest& request, const StepObserver& observer = {});

}  // namespace regioncomp
