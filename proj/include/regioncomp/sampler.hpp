// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "regioncomp/conditioner.hpp"
#include "regioncomp/latent.hpp"
#include "regioncomp/scene.hpp"

namespace regioncomp {

enum class Strategy { kGlobalOnly, kHardOnly, kSoftOnly, kRagFull, kLatentAverage };

std::string_view to_string(Strategy strategy) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;
std::span<const Strategy> all_strategies() noexcept;

struct SamplerConfig {
    std::size_t steps = 20;       ///< T
    std::size_t bind_steps = 5;   ///< r, used by rag_full
    double delta = 0.8;           ///< refinement blend weight
    double guidance = 3.5;        ///< classifier-free guidance scale
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::kRagFull;
    bool content_queries = false;
    ConditionerConfig conditioner;
    /// Worker threads for per-pixel attention. Never changes results.
    unsigned threads = 1;

    /// Throws ValidationError.
    void validate() const;

    /// Number of leading steps that run hard binding for this strategy.
    std::size_t binding_steps() const noexcept;

    bool operator==(const SamplerConfig&) const = default;
};

enum class Stage { kBind, kRefine, kGlobal, kAverage };

std::string_view to_string(Stage stage) noexcept;

struct StepEvent {
    std::size_t step = 0;
    double t = 1.0;
    Stage stage = Stage::kGlobal;
    std::size_t regions = 0;
};

/// `step=<j> t=<t> stage=<bind|refine|global|average> regions=<k>`
std::string format_step_event(const StepEvent& event);

struct Snapshot {
    double t = 1.0;
    LatentGrid latent;
};

/// Snapshots at t_j = (T - j) / T for j = 0..T.
struct Trajectory {
    std::vector<Snapshot> snapshots;

    const LatentGrid& initial() const { return snapshots.front().latent; }
    const LatentGrid& final_latent() const { return snapshots.back().latent; }
};

/// t_j = (T - j) / T.
double step_time(std::size_t step, std::size_t steps) noexcept;

/// Rectified-flow Euler step in clean-image form: x - dt * (x - x0_hat) / t.
/// Requires 0 < dt <= t <= 1; dt == t returns x0_hat exactly.
LatentGrid euler_step(const LatentGrid& x, double t, double dt, const LatentGrid& x0_hat);

/// Conditioner configured from a sampler config.
Conditioner make_conditioner(const SamplerConfig& config);

/// Encodings and pixel geometry derived once per scene.
struct ScenePlan {
    std::size_t height = 0;
    std::size_t width = 0;
    PromptEncoding global;
    PromptEncoding null;
    std::vector<PromptEncoding> fundamental;
    std::vector<PromptEncoding> descriptive;
    std::vector<PixelRect> rects;
    std::vector<PixelRect> refine_rects;
    std::vector<std::size_t> order;  ///< paste order

    static ScenePlan build(const Conditioner& conditioner, const SceneSpec& scene);
    std::size_t regions() const noexcept { return rects.size(); }
};

/// Guided clean-image predictions for one run. When the conditioner ignores latent
/// content the prediction of a (prompt, window) pair is memoised.
class GuidedPredictor {
public:
    GuidedPredictor(const Conditioner& conditioner, const ScenePlan& plan, double guidance);

    LatentGrid predict(const LatentGrid& latent, double t, const PromptEncoding& prompt, const PixelRect& window);

    std::size_t evaluations() const noexcept { return m_evaluations; }

private:
    using Key = std::tuple<std::string, std::size_t, std::size_t, std::size_t, std::size_t>;

    LatentGrid raw(const LatentGrid& latent, double t, const PromptEncoding& prompt, const PixelRect& window);

    const Conditioner& m_conditioner;
    const ScenePlan& m_plan;
    double m_guidance;
    bool m_memoise;
    std::size_t m_evaluations = 0;
    std::map<Key, LatentGrid> m_cache;
};

struct StepContext {
    const ScenePlan& plan;
    GuidedPredictor& predictor;
    double t;
    double dt;
};

/// Global latent advanced under the global prompt.
LatentGrid global_step(const LatentGrid& x, StepContext& ctx);

/// Every regional latent advances under its fundamental prompt, the global latent
/// advances under the global prompt, then regional latents are pasted in paste order.
std::pair<LatentGrid, std::vector<LatentGrid>> hard_binding_step(const LatentGrid& x,
                                                                 const std::vector<LatentGrid>& regional,
                                                                 StepContext& ctx);

/// Regional predictions under descriptive prompts (queries from the global latent),
/// cropped to refine rects, spliced into the global prediction and blended with it by
/// `delta` before the Euler step.
LatentGrid soft_refinement_step(const LatentGrid& x, StepContext& ctx, double delta);

/// MultiDiffusion-style baseline: regional predictions averaged where regions overlap;
/// pixels no region covers take the global prediction.
LatentGrid latent_average_step(const LatentGrid& x, StepContext& ctx);

/// A run advanced one step at a time. Owns its latents; repaint drives two runs in lockstep.
class SamplerRun {
public:
    SamplerRun(const SceneSpec& scene, const SamplerConfig& config);
    SamplerRun(const SceneSpec& scene, const SamplerConfig& config, LatentGrid initial);

    SamplerRun(const SamplerRun&) = delete;
    SamplerRun& operator=(const SamplerRun&) = delete;

    bool finished() const noexcept { return m_step >= m_config.steps; }
    std::size_t step_index() const noexcept { return m_step; }
    double time() const noexcept { return step_time(m_step, m_config.steps); }

    StepEvent advance();

    const LatentGrid& latent() const noexcept { return m_x; }
    const std::vector<LatentGrid>& regional_latents() const noexcept { return m_regional; }
    const ScenePlan& plan() const noexcept { return m_plan; }
    const SamplerConfig& config() const noexcept { return m_config; }

    /// x <- repaint_merge(x, edited, mask); masked pixels of live regional latents follow.
    void merge_masked(const LatentGrid& edited, const Mask& mask);

private:
    SamplerConfig m_config;
    Conditioner m_conditioner;
    ScenePlan m_plan;
    GuidedPredictor m_predictor;
    LatentGrid m_x;
    std::vector<LatentGrid> m_regional;
    std::size_t m_step = 0;
};

using StepObserver = std::function<void(const StepEvent&, const SamplerRun&)>;

/// Full trajectory for a scene. Deterministic in (scene, config).
Trajectory sample(const SceneSpec& scene, const SamplerConfig& config, const StepObserver& observer = {});

/// `sample` with every step global.
Trajectory sample_global(const SceneSpec& scene, const SamplerConfig& config, const StepObserver& observer = {});

}  // namespace regioncomp
