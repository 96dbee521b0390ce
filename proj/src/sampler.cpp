// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/sampler.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "regioncomp/error.hpp"
#include "regioncomp/rng.hpp"

namespace regioncomp {

namespace {

constexpr std::array<Strategy, 5> kStrategies = {Strategy::kGlobalOnly, Strategy::kHardOnly, Strategy::kSoftOnly,
                                                 Strategy::kRagFull, Strategy::kLatentAverage};

std::string shortest(double v) {
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

}  // namespace

std::string_view to_string(Strategy strategy) noexcept {
    switch (strategy) {
        case Strategy::kGlobalOnly: return "global_only";
        case Strategy::kHardOnly: return "hard_only";
        case Strategy::kSoftOnly: return "soft_only";
        case Strategy::kRagFull: return "rag_full";
        case Strategy::kLatentAverage: return "latent_average";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    for (Strategy s : kStrategies) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

std::span<const Strategy> all_strategies() noexcept { return kStrategies; }

void SamplerConfig::validate() const {
    if (steps == 0) throw ValidationError("steps must be at least 1", "steps");
    if (steps > 10000) throw ValidationError("steps must be at most 10000", "steps");
    if (bind_steps > steps) throw ValidationError("bind_steps must not exceed steps", "bind_steps");
    if (!std::isfinite(delta) || delta < 0.0 || delta > 1.0) {
        throw ValidationError("delta must lie in [0, 1]", "delta");
    }
    if (!std::isfinite(guidance) || guidance < 0.0) {
        throw ValidationError("guidance must be a finite non-negative number", "guidance");
    }
    if (conditioner.dim < 16) throw ValidationError("conditioner dim must be at least 16", "conditioner.dim");
    if (!(conditioner.sharpness > 0.0f) || !std::isfinite(conditioner.sharpness)) {
        throw ValidationError("conditioner sharpness must be positive", "conditioner.sharpness");
    }
    if (!std::isfinite(conditioner.content_gain)) {
        throw ValidationError("conditioner content_gain must be finite", "conditioner.content_gain");
    }
    if (threads == 0) throw ValidationError("threads must be at least 1", "threads");
}

std::size_t SamplerConfig::binding_steps() const noexcept {
    switch (strategy) {
        case Strategy::kHardOnly: return steps;
        case Strategy::kRagFull: return bind_steps;
        default: return 0;
    }
}

std::string_view to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::kBind: return "bind";
        case Stage::kRefine: return "refine";
        case Stage::kGlobal: return "global";
        case Stage::kAverage: return "average";
    }
    return "unknown";
}

std::string format_step_event(const StepEvent& event) {
    std::string out = "step=" + std::to_string(event.step) + " t=" + shortest(event.t) + " stage=";
    out += to_string(event.stage);
    out += " regions=" + std::to_string(event.regions);
    return out;
}

double step_time(std::size_t step, std::size_t steps) noexcept {
    return static_cast<double>(steps - step) / static_cast<double>(steps);
}

LatentGrid euler_step(const LatentGrid& x, double t, double dt, const LatentGrid& x0_hat) {
    if (!x.same_shape(x0_hat)) throw ShapeError("euler_step: latent and prediction shapes differ");
    if (!(t > 0.0) || t > 1.0 || !(dt > 0.0) || dt > t) {
        throw ValidationError("euler_step requires 0 < dt <= t <= 1", "t");
    }
    if (dt == t) return x0_hat;
    LatentGrid out(x.height(), x.width());
    auto o = out.data();
    auto a = x.data();
    auto p = x0_hat.data();
    const float ft = static_cast<float>(t);
    const float fdt = static_cast<float>(dt);
    for (std::size_t i = 0; i < o.size(); ++i) {
        const float velocity = (a[i] - p[i]) / ft;
        o[i] = a[i] - fdt * velocity;
    }
    return out;
}

Conditioner make_conditioner(const SamplerConfig& config) {
    return Conditioner(config.conditioner, ConditionerOptions{config.content_queries, config.threads});
}

ScenePlan ScenePlan::build(const Conditioner& conditioner, const SceneSpec& scene) {
    if (scene.regions.empty()) throw ValidationError("scene has no regions", "regions");
    ScenePlan plan;
    plan.height = scene.canvas_height;
    plan.width = scene.canvas_width;
    const std::vector<Token> global = scene.global_tokens.empty() ? derive_global_prompt(scene) : scene.global_tokens;
    plan.global = conditioner.encode(global);
    plan.null = conditioner.encode_null();
    for (const RegionSpec& region : scene.regions) {
        plan.fundamental.push_back(conditioner.encode(region.fundamental));
        plan.descriptive.push_back(
            conditioner.encode(region.descriptive.empty() ? region.fundamental : region.descriptive));
        plan.rects.push_back(rect_to_pixels(region.rect, plan.height, plan.width));
        plan.refine_rects.push_back(rect_to_pixels(region.refine_rect, plan.height, plan.width));
    }
    plan.order = paste_order(scene);
    return plan;
}

GuidedPredictor::GuidedPredictor(const Conditioner& conditioner, const ScenePlan& plan, double guidance)
    : m_conditioner(conditioner), m_plan(plan), m_guidance(guidance),
      m_memoise(!conditioner.options().content_queries) {}

LatentGrid GuidedPredictor::raw(const LatentGrid& latent, double t, const PromptEncoding& prompt,
                                const PixelRect& window) {
    ++m_evaluations;
    return m_conditioner.predict_x0(latent, t, prompt, window, m_plan.height, m_plan.width);
}

LatentGrid GuidedPredictor::predict(const LatentGrid& latent, double t, const PromptEncoding& prompt,
                                    const PixelRect& window) {
    if (!m_memoise) {
        return guide(raw(latent, t, prompt, window), raw(latent, t, m_plan.null, window), m_guidance);
    }
    Key key{join_tokens(prompt.tokens), window.row_start, window.row_end, window.col_start, window.col_end};
    auto it = m_cache.find(key);
    if (it == m_cache.end()) {
        LatentGrid guided = guide(raw(latent, t, prompt, window), raw(latent, t, m_plan.null, window), m_guidance);
        it = m_cache.emplace(std::move(key), std::move(guided)).first;
    }
    return it->second;
}

LatentGrid global_step(const LatentGrid& x, StepContext& ctx) {
    const PixelRect full = PixelRect::full(ctx.plan.height, ctx.plan.width);
    return euler_step(x, ctx.t, ctx.dt, ctx.predictor.predict(x, ctx.t, ctx.plan.global, full));
}

std::pair<LatentGrid, std::vector<LatentGrid>> hard_binding_step(const LatentGrid& x,
                                                                 const std::vector<LatentGrid>& regional,
                                                                 StepContext& ctx) {
    const ScenePlan& plan = ctx.plan;
    if (regional.size() != plan.regions()) throw ShapeError("hard_binding_step: one latent per region expected");
    std::vector<LatentGrid> next;
    next.reserve(regional.size());
    for (std::size_t i = 0; i < regional.size(); ++i) {
        const LatentGrid x0 = ctx.predictor.predict(regional[i], ctx.t, plan.fundamental[i], plan.rects[i]);
        next.push_back(euler_step(regional[i], ctx.t, ctx.dt, x0));
    }
    LatentGrid merged = global_step(x, ctx);
    for (std::size_t i : plan.order) merged = replace(merged, next[i], plan.rects[i]);
    return {std::move(merged), std::move(next)};
}

LatentGrid soft_refinement_step(const LatentGrid& x, StepContext& ctx, double delta) {
    const ScenePlan& plan = ctx.plan;
    const PixelRect full = PixelRect::full(plan.height, plan.width);
    const LatentGrid global = ctx.predictor.predict(x, ctx.t, plan.global, full);
    LatentGrid refined = global;
    for (std::size_t i : plan.order) {
        const LatentGrid regional = ctx.predictor.predict(x, ctx.t, plan.descriptive[i], full);
        refined = replace(refined, crop(regional, plan.refine_rects[i]), plan.refine_rects[i]);
    }
    return euler_step(x, ctx.t, ctx.dt, blend(global, refined, delta));
}

LatentGrid latent_average_step(const LatentGrid& x, StepContext& ctx) {
    const ScenePlan& plan = ctx.plan;
    const std::size_t h = plan.height;
    const std::size_t w = plan.width;
    LatentGrid sum(h, w);
    std::vector<std::uint32_t> count(h * w, 0);
    for (std::size_t i = 0; i < plan.regions(); ++i) {
        const PixelRect& rect = plan.rects[i];
        const LatentGrid pred = ctx.predictor.predict(crop(x, rect), ctx.t, plan.fundamental[i], rect);
        for (std::size_t r = 0; r < rect.rows(); ++r) {
            for (std::size_t c = 0; c < rect.cols(); ++c) {
                const std::size_t cr = r + rect.row_start;
                const std::size_t cc = c + rect.col_start;
                const bool first = count[cr * w + cc]++ == 0;
                for (std::size_t ch = 0; ch < kChannels; ++ch) {
                    if (first) {
                        sum.at(cr, cc, ch) = pred.at(r, c, ch);
                    } else {
                        sum.at(cr, cc, ch) += pred.at(r, c, ch);
                    }
                }
            }
        }
    }
    std::optional<LatentGrid> global;
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const std::uint32_t n = count[r * w + c];
            if (n == 0) {
                if (!global) global = ctx.predictor.predict(x, ctx.t, plan.global, PixelRect::full(h, w));
                for (std::size_t ch = 0; ch < kChannels; ++ch) sum.at(r, c, ch) = global->at(r, c, ch);
            } else if (n > 1) {
                for (std::size_t ch = 0; ch < kChannels; ++ch) sum.at(r, c, ch) /= static_cast<float>(n);
            }
        }
    }
    return euler_step(x, ctx.t, ctx.dt, sum);
}

SamplerRun::SamplerRun(const SceneSpec& scene, const SamplerConfig& config)
    : SamplerRun(scene, config, initial_noise(scene.canvas_height, scene.canvas_width, config.seed)) {}

SamplerRun::SamplerRun(const SceneSpec& scene, const SamplerConfig& config, LatentGrid initial)
    : m_config((config.validate(), config)),
      m_conditioner(make_conditioner(m_config)),
      m_plan(ScenePlan::build(m_conditioner, scene)),
      m_predictor(m_conditioner, m_plan, m_config.guidance),
      m_x(std::move(initial)) {
    if (m_x.height() != m_plan.height || m_x.width() != m_plan.width) {
        throw ShapeError("initial latent does not match the canvas");
    }
    if (m_config.binding_steps() > 0) {
        for (const PixelRect& rect : m_plan.rects) m_regional.push_back(crop(m_x, rect));
    }
}

StepEvent SamplerRun::advance() {
    if (finished()) throw ValidationError("sampler run already finished", "steps");
    StepEvent event;
    event.step = m_step;
    event.t = time();
    StepContext ctx{m_plan, m_predictor, event.t, event.t - step_time(m_step + 1, m_config.steps)};
    // Exact final step: dt must equal t bit for bit.
    if (m_step + 1 == m_config.steps) ctx.dt = ctx.t;

    switch (m_config.strategy) {
        case Strategy::kGlobalOnly:
            event.stage = Stage::kGlobal;
            m_x = global_step(m_x, ctx);
            break;
        case Strategy::kLatentAverage:
            event.stage = Stage::kAverage;
            event.regions = m_plan.regions();
            m_x = latent_average_step(m_x, ctx);
            break;
        default:
            event.regions = m_plan.regions();
            if (m_step < m_config.binding_steps()) {
                event.stage = Stage::kBind;
                auto [merged, regional] = hard_binding_step(m_x, m_regional, ctx);
                m_x = std::move(merged);
                m_regional = std::move(regional);
            } else {
                event.stage = Stage::kRefine;
                m_regional.clear();
                m_x = soft_refinement_step(m_x, ctx, m_config.delta);
            }
            break;
    }
    ++m_step;
    return event;
}

void SamplerRun::merge_masked(const LatentGrid& edited, const Mask& mask) {
    if (!mask.matches(m_x)) throw ShapeError("mask does not match the canvas");
    m_x = repaint_merge(m_x, edited, mask);
    for (std::size_t i = 0; i < m_regional.size(); ++i) {
        const PixelRect& rect = m_plan.rects[i];
        for (std::size_t r = rect.row_start; r < rect.row_end; ++r) {
            for (std::size_t c = rect.col_start; c < rect.col_end; ++c) {
                if (!mask.get(r, c)) continue;
                for (std::size_t ch = 0; ch < kChannels; ++ch) {
                    m_regional[i].at(r - rect.row_start, c - rect.col_start, ch) = edited.at(r, c, ch);
                }
            }
        }
    }
}

Trajectory sample(const SceneSpec& scene, const SamplerConfig& config, const StepObserver& observer) {
    SamplerRun run(scene, config);
    Trajectory out;
    out.snapshots.reserve(config.steps + 1);
    out.snapshots.push_back({run.time(), run.latent()});
    while (!run.finished()) {
        const StepEvent event = run.advance();
        out.snapshots.push_back({run.time(), run.latent()});
        if (observer) observer(event, run);
    }
    return out;
}

Trajectory sample_global(const SceneSpec& scene, const SamplerConfig& config, const StepObserver& observer) {
    SamplerConfig global = config;
    global.strategy = Strategy::kGlobalOnly;
    return sample(scene, global, observer);
}

}  // namespace regioncomp
