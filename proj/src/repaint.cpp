// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/repaint.hpp"

#include <memory>

#include "regioncomp/error.hpp"
#include "regioncomp/rng.hpp"

namespace regioncomp {

RepaintEdit apply_edit(const SceneSpec& scene, const RepaintRequest& request) {
    const std::size_t h = scene.canvas_height;
    const std::size_t w = scene.canvas_width;
    if (!request.region && !request.mask_rect && !request.mask) {
        throw ValidationError("repaint needs a region index or a mask", "target");
    }
    if (request.mask && request.mask_rect) {
        throw ValidationError("give either a mask or a mask rect, not both", "mask");
    }
    if (request.region && *request.region >= scene.regions.size()) {
        throw ValidationError("region index " + std::to_string(*request.region) + " out of range (scene has " +
                                  std::to_string(scene.regions.size()) + " regions)",
                              "region");
    }
    if (request.mask_rect) {
        const std::string why = rect_violation(*request.mask_rect);
        if (!why.empty()) throw ValidationError("mask rect: " + why, "mask_rect");
    }
    if (request.mask && (request.mask->height() != h || request.mask->width() != w)) {
        throw ValidationError("mask does not match the canvas", "mask");
    }
    const bool retokenise = request.base.has_value() || request.detail.has_value();

    RepaintEdit edit;
    edit.scene = scene;
    edit.nonce = request.nonce.value_or(1);
    if (request.mask) {
        edit.mask = *request.mask;
    } else if (request.mask_rect) {
        edit.mask = Mask::from_rect(h, w, rect_to_pixels(*request.mask_rect, h, w));
    } else {
        edit.mask = Mask::from_rect(h, w, rect_to_pixels(scene.regions[*request.region].rect, h, w));
    }

    if (retokenise) {
        if (request.region) {
            RegionSpec& target = edit.scene.regions[*request.region];
            const std::vector<Token> base = request.base.value_or(target.fundamental);
            // A new base without a detail resets the detail to the new base.
            const std::vector<Token> detail = request.detail ? *request.detail
                                              : request.base ? base
                                                             : target.descriptive;
            RegionSpec edited = make_region(target.rect, join_tokens(base), join_tokens(detail));
            edited.refine_rect = target.refine_rect;
            edited.synthetic = target.synthetic;
            target = std::move(edited);
        } else if (request.mask_rect) {
            if (!request.base) throw ValidationError("a new region needs base tokens", "base");
            const std::vector<Token> detail = request.detail.value_or(*request.base);
            edit.scene.regions.push_back(
                make_region(*request.mask_rect, join_tokens(*request.base), join_tokens(detail)));
        } else {
            throw ValidationError("new tokens need a region index or a mask rect to attach to", "region");
        }
    }
    finalize_scene(edit.scene);
    return edit;
}

Trajectory replay(const Lineage& lineage, const StepObserver& observer) {
    const SceneSpec& root = lineage.scene;
    std::vector<std::unique_ptr<SamplerRun>> runs;
    runs.push_back(std::make_unique<SamplerRun>(root, lineage.config));
    LatentGrid initial = runs.front()->latent();
    for (const RepaintEdit& edit : lineage.edits) {
        if (edit.scene.canvas_height != root.canvas_height || edit.scene.canvas_width != root.canvas_width) {
            throw ValidationError("repaint scene canvas differs from the base run", "scene.canvas");
        }
        if (!edit.mask.matches(initial)) throw ValidationError("repaint mask does not match the canvas", "mask");
        NoiseStream stream = NoiseStream::for_repaint(lineage.config.seed, edit.nonce);
        LatentGrid fresh = reinit_masked(initial, edit.mask, stream);
        initial = repaint_merge(initial, fresh, edit.mask);
        runs.push_back(std::make_unique<SamplerRun>(edit.scene, lineage.config, std::move(fresh)));
    }

    SamplerRun& merged = *runs.front();
    Trajectory out;
    out.snapshots.reserve(lineage.config.steps + 1);
    out.snapshots.push_back({merged.time(), initial});
    while (!merged.finished()) {
        StepEvent event{};
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const StepEvent e = runs[i]->advance();
            if (i == 0) event = e;
        }
        for (std::size_t i = 0; i < lineage.edits.size(); ++i) {
            merged.merge_masked(runs[i + 1]->latent(), lineage.edits[i].mask);
        }
        out.snapshots.push_back({merged.time(), merged.latent()});
        if (observer) observer(event, merged);
    }
    return out;
}

RepaintResult repaint(const Lineage& base, const RepaintRequest& request, const StepObserver& observer) {
    RepaintResult result;
    result.lineage = base;
    RepaintEdit edit = apply_edit(base.current_scene(), request);
    if (edit.mask.none()) {
        result.warnings.push_back("repaint mask is empty; returning the base run unchanged");
    } else {
        result.lineage.edits.push_back(std::move(edit));
    }
    result.trajectory = replay(result.lineage, observer);
    return result;
}

}  // namespace regioncomp
