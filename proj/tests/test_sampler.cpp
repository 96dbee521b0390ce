// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "regioncomp/bench.hpp"
#include "regioncomp/error.hpp"
#include "regioncomp/image_io.hpp"
#include "regioncomp/rng.hpp"
#include "regioncomp/sampler.hpp"
#include "test_util.hpp"

using namespace regioncomp;

namespace {

SceneSpec halves(const std::string& left, const std::string& right, bool hints = true, std::size_t size = 32) {
    SceneSpec s;
    s.canvas_height = s.canvas_width = size;
    s.location_hints = hints;
    s.regions = {make_region({0, 1, 0, 0.5}, left), make_region({0, 1, 0.5, 0.5}, right)};
    finalize_scene(s);
    return s;
}

SceneSpec single(const std::string& base, const std::string& detail = {}, std::size_t h = 32, std::size_t w = 32) {
    SceneSpec s;
    s.canvas_height = h;
    s.canvas_width = w;
    s.regions = {make_region({0, 1, 0, 1}, base, detail)};
    finalize_scene(s);
    return s;
}

SamplerConfig with(Strategy strategy) {
    SamplerConfig cfg;
    cfg.strategy = strategy;
    return cfg;
}

float guided(float cond, double s = 3.5) {
    return std::clamp(static_cast<float>(0.5 + s * (cond - 0.5)), kGuidanceMin, kGuidanceMax);
}

// Guided x0 of a lone colour+pattern phrase, from the value readout by hand.
LatentGrid phrase_target(Rgb color, bool striped, std::size_t h, std::size_t w) {
    LatentGrid out(h, w);
    for (std::size_t r = 0; r < h; ++r) {
        const float mod = striped && stripe_row(r) ? 0.5f : 1.0f;
        for (std::size_t c = 0; c < w; ++c) {
            for (std::size_t ch = 0; ch < 3; ++ch) out.at(r, c, ch) = guided(color[ch] * mod);
        }
    }
    return out;
}

void expect_trajectories_equal(const Trajectory& a, const Trajectory& b) {
    ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        EXPECT_EQ(a.snapshots[i].t, b.snapshots[i].t);
        ASSERT_TRUE(bit_equal(a.snapshots[i].latent, b.snapshots[i].latent)) << "snapshot " << i;
    }
}

double max_abs_diff(const LatentGrid& a, const LatentGrid& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a.data()[i]) - b.data()[i]));
    return m;
}

}  // namespace

TEST(EulerStep, Examples) {
    std::mt19937_64 rng(4);
    const LatentGrid x = regioncomp::testing::random_grid(rng, 4, 5);
    EXPECT_TRUE(bit_equal(euler_step(x, 0.6, 0.2, x), x));
    const LatentGrid target = regioncomp::testing::random_grid(rng, 4, 5);
    EXPECT_TRUE(bit_equal(euler_step(x, 0.35, 0.35, target), target));
    EXPECT_THROW(euler_step(x, 0.0, 0.0, target), ValidationError);
    EXPECT_THROW(euler_step(x, 0.5, 0.6, target), ValidationError);
    EXPECT_THROW(euler_step(x, 0.5, 0.1, LatentGrid(2, 2)), ShapeError);
}

TEST(EulerStep, ConstantTargetIsReachedFromNoise) {
    for (std::size_t steps : {1u, 3u, 20u, 97u}) {
        LatentGrid x = initial_noise(6, 6, steps);
        const LatentGrid c(6, 6, 0.37f);
        LatentGrid probe = x;
        for (std::size_t j = 0; j < steps; ++j) {
            const double t = step_time(j, steps);
            const double dt = t - step_time(j + 1, steps);
            // Closed form x(t) = c + t (x(1) - c), checked mid-way as well.
            x = euler_step(x, t, dt, c);
            const double t_next = step_time(j + 1, steps);
            for (std::size_t i = 0; i < x.size(); ++i) {
                ASSERT_NEAR(x.data()[i], 0.37 + t_next * (probe.data()[i] - 0.37), 1e-5);
            }
        }
        EXPECT_LE(max_abs_diff(x, c), 1e-5);
    }
}

TEST(StepTime, Grid) {
    EXPECT_EQ(step_time(0, 20), 1.0);
    EXPECT_EQ(step_time(20, 20), 0.0);
    EXPECT_EQ(step_time(5, 20), 0.75);
}

TEST(SamplerConfig, Validation) {
    SamplerConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.bind_steps = 21;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = {};
    cfg.delta = 1.5;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = {};
    cfg.steps = 0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = {};
    cfg.guidance = -1;
    EXPECT_THROW(cfg.validate(), ValidationError);
    EXPECT_EQ(with(Strategy::kHardOnly).binding_steps(), 20u);
    EXPECT_EQ(with(Strategy::kRagFull).binding_steps(), 5u);
    EXPECT_EQ(with(Strategy::kSoftOnly).binding_steps(), 0u);
    for (Strategy s : all_strategies()) EXPECT_EQ(parse_strategy(to_string(s)), s);
    EXPECT_FALSE(parse_strategy("hard"));
}

TEST(SampleGlobal, RedSolidConvergesToGuidedTarget) {
    const Trajectory traj = sample_global(single("red solid", {}, 64, 64), {});
    ASSERT_EQ(traj.snapshots.size(), 21u);
    EXPECT_EQ(traj.snapshots.front().t, 1.0);
    EXPECT_EQ(traj.snapshots.back().t, 0.0);
    EXPECT_TRUE(bit_equal(traj.initial(), initial_noise(64, 64, 0)));
    const LatentGrid& out = traj.final_latent();
    for (std::size_t r = 0; r < 64; ++r) {
        for (std::size_t c = 0; c < 64; ++c) {
            EXPECT_NEAR(out.at(r, c, 0), 1.25, 1e-4);
            EXPECT_NEAR(out.at(r, c, 1), -0.25, 1e-4);
            EXPECT_NEAR(out.at(r, c, 2), -0.25, 1e-4);
        }
    }
}

TEST(SampleGlobal, AmbiguousHalvesShareTheMixture) {
    const SceneSpec scene = halves("red solid", "blue solid", false);
    const LatentGrid out = sample_global(scene, {}).final_latent();
    // With hints off every logit is equal, so the readout is the plain average.
    const Rgb mix{guided(0.5f), guided(0.0f), guided(0.5f)};
    for (std::size_t r = 0; r < 32; ++r) {
        for (std::size_t c = 0; c < 32; ++c) {
            for (std::size_t ch = 0; ch < 3; ++ch) ASSERT_NEAR(out.at(r, c, ch), mix[ch], 1e-3);
        }
    }
}

TEST(Sample, DeterministicAcrossRunsAndThreads) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const SceneSpec scene = regioncomp::testing::random_scene(rng);
        for (Strategy s : all_strategies()) {
            SamplerConfig cfg = with(s);
            cfg.seed = 1000 + trial;
            const Trajectory a = sample(scene, cfg);
            const Trajectory b = sample(scene, cfg);
            cfg.threads = 4;
            const Trajectory c = sample(scene, cfg);
            cfg.content_queries = true;
            const Trajectory d = sample(scene, cfg);
            cfg.threads = 1;
            const Trajectory e = sample(scene, cfg);
            expect_trajectories_equal(a, b);
            expect_trajectories_equal(a, c);
            expect_trajectories_equal(d, e);
        }
    }
}

TEST(Sample, SingleRegionExactForEveryStrategy) {
    for (Word color : color_words()) {
        for (bool striped : {false, true}) {
            const std::string base = std::string(Token{color}.lexeme()) + (striped ? " striped" : " solid");
            const SceneSpec scene = single(base, {}, 24, 40);
            const LatentGrid target = phrase_target(anchor_color(color), striped, 24, 40);
            for (Strategy s : all_strategies()) {
                ASSERT_LE(max_abs_diff(sample(scene, with(s)).final_latent(), target), 1e-4)
                    << base << " " << to_string(s);
            }
        }
    }
}

TEST(Sample, SingleRegionWithModifierBlendsBothPrompts) {
    const SceneSpec scene = single("green solid", "dark green solid", 16, 16);
    const LatentGrid plain = phrase_target(anchor_color(Word::kGreen), false, 16, 16);
    const LatentGrid dark = phrase_target(apply_modifier(Word::kDark, anchor_color(Word::kGreen)), false, 16, 16);
    EXPECT_LE(max_abs_diff(sample(scene, with(Strategy::kHardOnly)).final_latent(), plain), 1e-4);
    EXPECT_LE(max_abs_diff(sample(scene, with(Strategy::kSoftOnly)).final_latent(), blend(plain, dark, 0.8)), 1e-4);
}

TEST(HardBinding, SingleFullRegionOverwritesEverything) {
    const SceneSpec scene = single("blue striped");
    SamplerRun run(scene, with(Strategy::kHardOnly));
    run.advance();
    ASSERT_EQ(run.regional_latents().size(), 1u);
    EXPECT_TRUE(bit_equal(run.latent(), run.regional_latents()[0]));
}

TEST(HardBinding, CropMatchesIndependentlyEvolvedRegions) {
    const auto scenes = generate_suite(named_suite("mixed", 12, 3));
    for (const SceneSpec& scene : scenes) {
        SamplerConfig cfg = with(Strategy::kHardOnly);
        cfg.seed = 99;
        SamplerRun run(scene, cfg);
        const Conditioner cond = make_conditioner(cfg);
        const PromptEncoding null = cond.encode_null();
        const LatentGrid x_T = initial_noise(scene.canvas_height, scene.canvas_width, cfg.seed);
        std::vector<LatentGrid> own;
        std::vector<PixelRect> rects;
        for (const RegionSpec& region : scene.regions) {
            rects.push_back(rect_to_pixels(region.rect, scene.canvas_height, scene.canvas_width));
            own.push_back(crop(x_T, rects.back()));
        }
        while (!run.finished()) {
            const double t = run.time();
            const double dt = t - step_time(run.step_index() + 1, cfg.steps);
            for (std::size_t i = 0; i < own.size(); ++i) {
                const PromptEncoding enc = cond.encode(scene.regions[i].fundamental);
                const LatentGrid x0 = guide(
                    cond.predict_x0(own[i], t, enc, rects[i], scene.canvas_height, scene.canvas_width),
                    cond.predict_x0(own[i], t, null, rects[i], scene.canvas_height, scene.canvas_width), cfg.guidance);
                own[i] = euler_step(own[i], t, dt, x0);
            }
            const StepEvent ev = run.advance();
            EXPECT_EQ(ev.stage, Stage::kBind);
            for (std::size_t i = 0; i < own.size(); ++i) {
                ASSERT_TRUE(bit_equal(run.regional_latents()[i], own[i]));
                ASSERT_TRUE(bit_equal(crop(run.latent(), rects[i]), own[i])) << "region " << i;
            }
        }
    }
}

TEST(HardBinding, FullBindingEqualsIndependentRuns) {
    const SceneSpec both = halves("red solid", "cyan striped");
    SceneSpec left_only = both;
    left_only.regions = {both.regions[0]};
    finalize_scene(left_only);
    SceneSpec right_only = both;
    right_only.regions = {both.regions[1]};
    finalize_scene(right_only);

    const SamplerConfig cfg = with(Strategy::kHardOnly);
    const LatentGrid joint = sample(both, cfg).final_latent();
    const PixelRect l = rect_to_pixels(both.regions[0].rect, 32, 32);
    const PixelRect r = rect_to_pixels(both.regions[1].rect, 32, 32);
    EXPECT_TRUE(bit_equal(crop(joint, l), crop(sample(left_only, cfg).final_latent(), l)));
    EXPECT_TRUE(bit_equal(crop(joint, r), crop(sample(right_only, cfg).final_latent(), r)));
}

TEST(HardBinding, RegionCountMismatch) {
    const SceneSpec scene = halves("red solid", "blue solid");
    const Conditioner cond;
    const ScenePlan plan = ScenePlan::build(cond, scene);
    GuidedPredictor predictor(cond, plan, 3.5);
    StepContext ctx{plan, predictor, 1.0, 0.05};
    EXPECT_THROW(hard_binding_step(LatentGrid(32, 32), {LatentGrid(32, 16)}, ctx), ShapeError);
}

TEST(SoftRefinement, BlendEndpoints) {
    const SceneSpec scene = halves("red solid", "green striped", false);
    const Conditioner cond;
    const ScenePlan plan = ScenePlan::build(cond, scene);
    GuidedPredictor predictor(cond, plan, 3.5);
    const LatentGrid x = initial_noise(32, 32, 5);

    StepContext ctx{plan, predictor, 0.6, 0.05};
    EXPECT_TRUE(bit_equal(soft_refinement_step(x, ctx, 0.0), global_step(x, ctx)));

    // A final step (dt == t) returns x0_hat, which at delta = 1 is the regional prediction.
    StepContext last{plan, predictor, 0.05, 0.05};
    const LatentGrid x0 = soft_refinement_step(x, last, 1.0);
    for (std::size_t i = 0; i < 2; ++i) {
        const LatentGrid full =
            guide(cond.predict_x0(x, 0.05, cond.encode(scene.regions[i].descriptive), PixelRect::full(32, 32), 32, 32),
                  cond.predict_x0(x, 0.05, cond.encode_null(), PixelRect::full(32, 32), 32, 32), 3.5);
        EXPECT_TRUE(bit_equal(crop(x0, plan.rects[i]), crop(full, plan.rects[i])));
    }
}

TEST(Sample, DefinitionalCollapses) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const SceneSpec scene = regioncomp::testing::random_scene(rng);
        SamplerConfig rag = with(Strategy::kRagFull);
        rag.seed = trial;
        rag.bind_steps = 0;
        SamplerConfig soft = with(Strategy::kSoftOnly);
        soft.seed = trial;
        expect_trajectories_equal(sample(scene, rag), sample(scene, soft));

        rag.delta = 0.0;
        SamplerConfig global = with(Strategy::kGlobalOnly);
        global.seed = trial;
        expect_trajectories_equal(sample(scene, rag), sample(scene, global));
        expect_trajectories_equal(sample_global(scene, global), sample(scene, global));

        SamplerConfig full_bind = with(Strategy::kRagFull);
        full_bind.seed = trial;
        full_bind.bind_steps = full_bind.steps;
        SamplerConfig hard = with(Strategy::kHardOnly);
        hard.seed = trial;
        expect_trajectories_equal(sample(scene, full_bind), sample(scene, hard));
    }
}

TEST(Sample, StageInstrumentation) {
    const SceneSpec scene = halves("red solid", "blue solid");
    std::vector<StepEvent> events;
    std::vector<std::size_t> live;
    sample(scene, with(Strategy::kRagFull), [&](const StepEvent& e, const SamplerRun& run) {
        events.push_back(e);
        live.push_back(run.regional_latents().size());
    });
    ASSERT_EQ(events.size(), 20u);
    for (std::size_t j = 0; j < 20; ++j) {
        EXPECT_EQ(events[j].step, j);
        EXPECT_EQ(events[j].t, step_time(j, 20));
        EXPECT_EQ(events[j].stage, j < 5 ? Stage::kBind : Stage::kRefine);
        EXPECT_EQ(events[j].regions, 2u);
        EXPECT_EQ(live[j], j < 5 ? 2u : 0u);
    }
    EXPECT_EQ(format_step_event(events[0]), "step=0 t=1 stage=bind regions=2");
    EXPECT_EQ(format_step_event(events[5]), "step=5 t=0.75 stage=refine regions=2");

    std::vector<Stage> stages;
    sample(scene, with(Strategy::kGlobalOnly), [&](const StepEvent& e, const SamplerRun&) { stages.push_back(e.stage); });
    EXPECT_TRUE(std::ranges::all_of(stages, [](Stage s) { return s == Stage::kGlobal; }));
    stages.clear();
    sample(scene, with(Strategy::kLatentAverage), [&](const StepEvent& e, const SamplerRun&) { stages.push_back(e.stage); });
    EXPECT_TRUE(std::ranges::all_of(stages, [](Stage s) { return s == Stage::kAverage; }));
}

TEST(Sample, PredictionsAreMemoisedWithoutContentQueries) {
    const SceneSpec scene = halves("red solid", "blue solid");
    const Conditioner cond;
    const ScenePlan plan = ScenePlan::build(cond, scene);
    GuidedPredictor predictor(cond, plan, 3.5);
    const LatentGrid x = initial_noise(32, 32, 1);
    const auto a = predictor.predict(x, 1.0, plan.global, PixelRect::full(32, 32));
    const auto b = predictor.predict(x, 0.5, plan.global, PixelRect::full(32, 32));
    EXPECT_TRUE(bit_equal(a, b));
    EXPECT_EQ(predictor.evaluations(), 2u);  // cond + uncond once
}

TEST(LatentAverage, OverlapsAverageAndGapsTakeGlobal) {
    SceneSpec scene;
    scene.canvas_height = scene.canvas_width = 16;
    scene.regions = {make_region({0, 1, 0, 0.75}, "red solid"), make_region({0, 1, 0.25, 0.5}, "blue solid")};
    scene.global_override = true;
    scene.global_tokens = parse_token_list("green solid");
    finalize_scene(scene);
    // Background covers the last quarter; drop it to expose the global fallback.
    scene.regions.pop_back();
    const Conditioner cond;
    const ScenePlan plan = ScenePlan::build(cond, scene);
    GuidedPredictor predictor(cond, plan, 3.5);
    StepContext last{plan, predictor, 0.05, 0.05};
    const LatentGrid x0 = latent_average_step(initial_noise(16, 16, 2), last);
    EXPECT_NEAR(x0.at(3, 0, 0), 1.25, 1e-6);                       // red only
    EXPECT_NEAR(x0.at(3, 6, 0), (guided(1.0f) + guided(0.0f)) / 2, 1e-6);  // red and blue
    EXPECT_NEAR(x0.at(3, 6, 2), (guided(0.0f) + guided(1.0f)) / 2, 1e-6);
    EXPECT_NEAR(x0.at(3, 14, 1), 1.25, 1e-6);                      // global green
}

TEST(Sample, MonotoneLeakageOnAmbiguousPairs) {
    const SceneSuite suite = named_suite("ambiguous2", 40);
    SamplerConfig soft = with(Strategy::kSoftOnly);
    soft.delta = 0.5;
    const BenchResult res = run_arms(suite.name, generate_suite(suite),
                                     {{"global_only", with(Strategy::kGlobalOnly)}, {"soft_half", soft},
                                      {"rag_full", with(Strategy::kRagFull)}},
                                     {2, false, false});
    ASSERT_EQ(res.rows.size(), 3u);
    EXPECT_GT(res.rows[0].color_error, res.rows[1].color_error);
    EXPECT_GT(res.rows[1].color_error, res.rows[2].color_error);
}

TEST(SamplerRun, RejectsMismatchedInitialLatent) {
    EXPECT_THROW(SamplerRun(single("red solid"), {}, LatentGrid(4, 4)), ShapeError);
}

TEST(Sample, DescriptiveModifiersReachOnlyRefinement) {
    SceneSpec scene;
    scene.regions = {make_region({0, 1, 0, 0.5}, "red solid", "dark red solid"),
                     make_region({0, 1, 0.5, 0.5}, "blue solid")};
    finalize_scene(scene);
    const double target = apply_modifier(Word::kDark, anchor_color(Word::kRed))[0];
    auto left_red = [&](Strategy s) {
        const LatentGrid img = clamp01(sample(scene, with(s)).final_latent());
        double sum = 0.0;
        for (std::size_t r = 0; r < 64; ++r)
            for (std::size_t c = 0; c < 32; ++c) sum += img.at(r, c, 0);
        return sum / (64 * 32);
    };
    const double hard = left_red(Strategy::kHardOnly);
    const double rag = left_red(Strategy::kRagFull);
    EXPECT_EQ(hard, 1.0);
    EXPECT_LT(std::abs(rag - target), std::abs(hard - target));
}
