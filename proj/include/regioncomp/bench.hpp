// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regioncomp/image_io.hpp"
#include "regioncomp/latent.hpp"
#include "regioncomp/sampler.hpp"
#include "regioncomp/scene.hpp"

namespace regioncomp {

/// Region index owning each pixel (paste order, later wins), -1 where uncovered.
std::vector<int> ownership_map(const SceneSpec& scene);

/// Anchor colour with the descriptive modifiers applied in order.
Rgb region_target_color(const RegionSpec& region);

/// What a perfect generation looks like: every pixel takes its owner's target colour,
/// halved on stripe rows of striped regions; uncovered pixels are mid grey.
LatentGrid closed_form_target(const SceneSpec& scene);

struct SceneScore {
    double color_error = 0.0;          ///< mean over regions of the mean per-pixel L2 distance
    double assignment_accuracy = 0.0;  ///< correct / scored regions
    double seam_score = 0.0;
    double modifier_fidelity = 0.0;  ///< minus mean |chroma delta|; 0 is perfect
    std::size_t regions = 0;         ///< scored (non-synthetic) regions
    std::size_t correct = 0;
    std::size_t modifier_regions = 0;
    std::vector<bool> assigned;  ///< per scored region, in region order
};

/// Scores a final latent. Colour, assignment and modifier metrics read the display
/// image (values clamped to [0, 1]); the seam metric reads the latent itself.
SceneScore score(const LatentGrid& image, const SceneSpec& scene);

enum class ModifierPolicy { kNone, kUniform, kVivid };

std::string_view to_string(ModifierPolicy policy) noexcept;

struct SceneSuite {
    std::string name = "custom";
    std::uint64_t seed = 1;
    std::size_t k_min = 2;
    std::size_t k_max = 2;
    bool hints = false;
    std::size_t count = 1;
    ModifierPolicy modifiers = ModifierPolicy::kNone;
    std::size_t canvas = 64;
};

/// Built-in suites: single, ambiguous2, ambiguous3, hinted, vivid2, mixed.
/// `count` overrides the suite's default size when given.
SceneSuite named_suite(std::string_view name, std::optional<std::size_t> count = std::nullopt,
                       std::uint64_t seed = 1);
std::vector<std::string> suite_names();

/// Deterministic, pairwise distinct scenes. Layouts: 1 region full canvas, 2 regions
/// side by side or stacked, 3 in columns, 4 in a 2x2 grid. Throws ValidationError.
std::vector<SceneSpec> generate_suite(const SceneSuite& suite);

struct MetricsRow {
    std::string strategy;
    std::string suite;
    std::size_t n = 0;
    double color_error = 0.0;
    double assignment_accuracy = 0.0;
    double seam_score = 0.0;
    double modifier_fidelity = 0.0;
    double runtime_ms = 0.0;

    bool operator==(const MetricsRow&) const = default;
    /// Equality on everything except runtime.
    bool same_metrics(const MetricsRow& other) const;
};

struct SceneResult {
    std::size_t scene = 0;
    std::string label;
    SceneScore score;
    double runtime_ms = 0.0;
    LatentGrid image;  ///< final latent, kept only when requested
};

struct BenchOptions {
    unsigned jobs = 1;
    bool timing = true;  ///< false writes runtime_ms = 0 so reports are byte-stable
    bool keep_images = false;
};

struct BenchResult {
    std::vector<MetricsRow> rows;
    std::vector<SceneResult> scenes;  ///< per row, then per scene
};

/// One labelled sampler configuration of a sweep.
struct BenchArm {
    std::string label;
    SamplerConfig config;
};

/// Every (arm, scene) pair; aggregation follows arm order then scene order.
BenchResult run_arms(const std::string& suite_name, const std::vector<SceneSpec>& scenes,
                     const std::vector<BenchArm>& arms, const BenchOptions& options = {});

BenchResult run_benchmark(const SceneSuite& suite, const std::vector<Strategy>& strategies,
                          const SamplerConfig& config, const BenchOptions& options = {});

MetricsRow aggregate(const std::string& label, const std::string& suite, const std::vector<SceneResult>& results);

inline constexpr std::string_view kMetricsHeader =
    "strategy,suite,n,color_error,assignment_accuracy,seam_score,modifier_fidelity,runtime_ms";

std::string metrics_csv(const std::vector<MetricsRow>& rows);
/// Throws ValidationError on malformed input.
std::vector<MetricsRow> parse_metrics_csv(std::string_view text);
std::string metrics_table(const std::vector<MetricsRow>& rows);

/// Writes metrics.csv and metrics.txt into `dir` (created if needed), and per-scene
/// PPM/PNG images for results that kept them. Returns the written paths.
std::vector<std::string> emit_report(const std::string& dir, const BenchResult& result,
                                     const std::vector<SceneSpec>& scenes = {});

struct AblationCell {
    std::size_t bind_steps = 0;
    double delta = 0.0;
    MetricsRow row;
};

struct AblationResult {
    std::vector<AblationCell> cells;  ///< r-major
    std::vector<std::size_t> r_values;
    std::vector<double> deltas;
    BenchResult bench;
    Image8 sheet;  ///< first scene of every cell, one row per r
};

std::vector<std::size_t> default_r_values(std::size_t steps);
std::vector<double> default_deltas();

/// rag_full over the r x delta grid.
AblationResult run_ablation(const SceneSuite& suite, const SamplerConfig& config, std::vector<std::size_t> r_values,
                            std::vector<double> deltas, const BenchOptions& options = {});

}  // namespace regioncomp
