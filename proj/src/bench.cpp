// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/bench.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <set>
#include <sstream>

#include "regioncomp/error.hpp"
#include "regioncomp/parallel.hpp"
#include "regioncomp/rng.hpp"

namespace regioncomp {

namespace {

struct Accumulator {
    std::array<double, 3> sum{};
    std::size_t n = 0;

    void add(std::span<const float> px) {
        for (std::size_t c = 0; c < 3; ++c) sum[c] += px[c];
        ++n;
    }
    std::array<double, 3> mean() const {
        std::array<double, 3> m{};
        if (n == 0) return m;
        for (std::size_t c = 0; c < 3; ++c) m[c] = sum[c] / static_cast<double>(n);
        return m;
    }
};

double l2(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    double s = 0.0;
    for (std::size_t c = 0; c < 3; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
    return std::sqrt(s);
}

double chroma(const std::array<double, 3>& c) {
    return *std::max_element(c.begin(), c.end()) - *std::min_element(c.begin(), c.end());
}

Rgb modulated(Rgb color, bool striped, std::size_t row) {
    if (striped && stripe_row(row)) {
        for (float& v : color) v *= 0.5f;
    }
    return color;
}

Rgb with_modifiers(Rgb color, const RegionSpec& region) {
    for (Word m : region.modifiers()) color = apply_modifier(m, color);
    return color;
}

std::string shortest(double v) {
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

}  // namespace

std::vector<int> ownership_map(const SceneSpec& scene) {
    const std::size_t h = scene.canvas_height;
    const std::size_t w = scene.canvas_width;
    std::vector<int> owner(h * w, -1);
    for (std::size_t i : paste_order(scene)) {
        const PixelRect px = rect_to_pixels(scene.regions[i].rect, h, w);
        for (std::size_t r = px.row_start; r < px.row_end; ++r) {
            for (std::size_t c = px.col_start; c < px.col_end; ++c) owner[r * w + c] = static_cast<int>(i);
        }
    }
    return owner;
}

Rgb region_target_color(const RegionSpec& region) { return with_modifiers(anchor_color(region.color()), region); }

LatentGrid closed_form_target(const SceneSpec& scene) {
    const std::size_t h = scene.canvas_height;
    const std::size_t w = scene.canvas_width;
    const std::vector<int> owner = ownership_map(scene);
    LatentGrid out(h, w, 0.5f);
    std::vector<Rgb> colors;
    for (const RegionSpec& region : scene.regions) colors.push_back(region_target_color(region));
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const int o = owner[r * w + c];
            if (o < 0) continue;
            const RegionSpec& region = scene.regions[static_cast<std::size_t>(o)];
            const Rgb v = modulated(colors[static_cast<std::size_t>(o)], region.pattern() == Word::kStriped, r);
            for (std::size_t ch = 0; ch < 3; ++ch) out.at(r, c, ch) = v[ch];
        }
    }
    return out;
}

SceneScore score(const LatentGrid& image, const SceneSpec& scene) {
    const std::size_t h = scene.canvas_height;
    const std::size_t w = scene.canvas_width;
    if (image.height() != h || image.width() != w) throw ShapeError("score: image does not match the scene canvas");
    const LatentGrid display = clamp01(image);
    const std::vector<int> owner = ownership_map(scene);
    const std::size_t k = scene.regions.size();

    // Per-region accumulators: realised mean, target mean, per-anchor candidate means.
    std::vector<Accumulator> realised(k);
    std::vector<double> error_sum(k, 0.0);
    std::vector<std::array<double, 3>> target_sum(k, std::array<double, 3>{});
    std::vector<std::array<std::array<double, 3>, kColorCount>> candidate_sum(k);
    std::vector<std::array<Rgb, kColorCount>> candidates(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t a = 0; a < kColorCount; ++a) {
            candidates[i][a] = with_modifiers(anchor_color(color_words()[a]), scene.regions[i]);
        }
    }
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const int o = owner[r * w + c];
            if (o < 0) continue;
            const std::size_t i = static_cast<std::size_t>(o);
            const bool striped = scene.regions[i].pattern() == Word::kStriped;
            const auto px = display.pixel(r, c);
            realised[i].add(px);
            const Rgb target = modulated(region_target_color(scene.regions[i]), striped, r);
            double e = 0.0;
            for (std::size_t ch = 0; ch < 3; ++ch) {
                const double d = static_cast<double>(px[ch]) - target[ch];
                e += d * d;
                target_sum[i][ch] += target[ch];
            }
            error_sum[i] += std::sqrt(e);
            for (std::size_t a = 0; a < kColorCount; ++a) {
                const Rgb cand = modulated(candidates[i][a], striped, r);
                for (std::size_t ch = 0; ch < 3; ++ch) candidate_sum[i][a][ch] += cand[ch];
            }
        }
    }

    SceneScore out;
    double error_total = 0.0;
    double fidelity_total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const RegionSpec& region = scene.regions[i];
        if (region.synthetic || realised[i].n == 0) continue;
        const double n = static_cast<double>(realised[i].n);
        const auto mean = realised[i].mean();
        ++out.regions;
        error_total += error_sum[i] / n;

        std::size_t best = 0;
        double best_distance = 0.0;
        for (std::size_t a = 0; a < kColorCount; ++a) {
            std::array<double, 3> expected{};
            for (std::size_t ch = 0; ch < 3; ++ch) expected[ch] = candidate_sum[i][a][ch] / n;
            const double d = l2(mean, expected);
            if (a == 0 || d < best_distance) {
                best = a;
                best_distance = d;
            }
        }
        const bool ok = color_words()[best] == region.color();
        out.assigned.push_back(ok);
        if (ok) ++out.correct;

        if (!region.modifiers().empty()) {
            std::array<double, 3> target_mean{};
            for (std::size_t ch = 0; ch < 3; ++ch) target_mean[ch] = target_sum[i][ch] / n;
            fidelity_total += std::abs(chroma(mean) - chroma(target_mean));
            ++out.modifier_regions;
        }
    }
    if (out.regions > 0) {
        out.color_error = error_total / static_cast<double>(out.regions);
        out.assignment_accuracy = static_cast<double>(out.correct) / static_cast<double>(out.regions);
    }
    if (out.modifier_regions > 0) out.modifier_fidelity = -fidelity_total / static_cast<double>(out.modifier_regions);

    // Seams: |difference| of adjacent pixels with different owners, against the same
    // statistic one pixel further inside each owner.
    auto pair_diff = [&](std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1) {
        double s = 0.0;
        for (std::size_t ch = 0; ch < 3; ++ch) s += std::abs(static_cast<double>(image.at(r0, c0, ch)) - image.at(r1, c1, ch));
        return s / 3.0;
    };
    auto own = [&](std::ptrdiff_t r, std::ptrdiff_t c) -> int {
        if (r < 0 || c < 0 || r >= static_cast<std::ptrdiff_t>(h) || c >= static_cast<std::ptrdiff_t>(w)) return -2;
        return owner[static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c)];
    };
    double boundary = 0.0;
    std::size_t boundary_n = 0;
    double interior = 0.0;
    std::size_t interior_n = 0;
    constexpr std::array<std::array<int, 2>, 2> kDirs{{{0, 1}, {1, 0}}};
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            for (const auto& d : kDirs) {
                const auto r1 = static_cast<std::ptrdiff_t>(r) + d[0];
                const auto c1 = static_cast<std::ptrdiff_t>(c) + d[1];
                const int a = own(static_cast<std::ptrdiff_t>(r), static_cast<std::ptrdiff_t>(c));
                const int b = own(r1, c1);
                if (b == -2 || a == b) continue;
                boundary += pair_diff(r, c, static_cast<std::size_t>(r1), static_cast<std::size_t>(c1));
                ++boundary_n;
                const auto ra = static_cast<std::ptrdiff_t>(r) - d[0];
                const auto ca = static_cast<std::ptrdiff_t>(c) - d[1];
                if (own(ra, ca) == a) {
                    interior += pair_diff(static_cast<std::size_t>(ra), static_cast<std::size_t>(ca), r, c);
                    ++interior_n;
                }
                const auto rb = r1 + d[0];
                const auto cb = c1 + d[1];
                if (own(rb, cb) == b) {
                    interior += pair_diff(static_cast<std::size_t>(r1), static_cast<std::size_t>(c1),
                                          static_cast<std::size_t>(rb), static_cast<std::size_t>(cb));
                    ++interior_n;
                }
            }
        }
    }
    if (boundary_n > 0) {
        out.seam_score = boundary / static_cast<double>(boundary_n) -
                         (interior_n > 0 ? interior / static_cast<double>(interior_n) : 0.0);
    }
    return out;
}

std::string_view to_string(ModifierPolicy policy) noexcept {
    switch (policy) {
        case ModifierPolicy::kNone: return "none";
        case ModifierPolicy::kUniform: return "uniform";
        case ModifierPolicy::kVivid: return "vivid";
    }
    return "unknown";
}

SceneSuite named_suite(std::string_view name, std::optional<std::size_t> count, std::uint64_t seed) {
    SceneSuite s;
    s.name = std::string(name);
    s.seed = seed;
    if (name == "single") {
        s.k_min = s.k_max = 1;
        s.hints = true;
        s.count = 16;
    } else if (name == "ambiguous2") {
        s.k_min = s.k_max = 2;
        s.count = 200;
    } else if (name == "ambiguous3") {
        s.k_min = s.k_max = 3;
        s.count = 200;
    } else if (name == "hinted") {
        s.k_min = 2;
        s.k_max = 3;
        s.hints = true;
        s.count = 200;
    } else if (name == "vivid2") {
        s.k_min = s.k_max = 2;
        s.modifiers = ModifierPolicy::kVivid;
        s.count = 50;
    } else if (name == "mixed") {
        s.k_min = 1;
        s.k_max = 4;
        s.hints = true;
        s.modifiers = ModifierPolicy::kUniform;
        s.count = 100;
    } else {
        throw ValidationError("unknown suite '" + std::string(name) + "'", "suite");
    }
    if (count) s.count = *count;
    return s;
}

std::vector<std::string> suite_names() { return {"single", "ambiguous2", "ambiguous3", "hinted", "vivid2", "mixed"}; }

namespace {

std::size_t draw_below(NoiseStream& rng, std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(n)));
}

std::vector<RegionRect> layout_rects(std::size_t k, NoiseStream& rng) {
    switch (k) {
        case 1: return {RegionRect{0.0, 1.0, 0.0, 1.0}};
        case 2:
            if (draw_below(rng, 2) == 0) return {RegionRect{0.0, 1.0, 0.0, 0.5}, RegionRect{0.0, 1.0, 0.5, 0.5}};
            return {RegionRect{0.0, 0.5, 0.0, 1.0}, RegionRect{0.5, 0.5, 0.0, 1.0}};
        case 3: {
            const double third = 1.0 / 3.0;
            return {RegionRect{0.0, 1.0, 0.0, third}, RegionRect{0.0, 1.0, third, third},
                    RegionRect{0.0, 1.0, 2.0 * third, 1.0 - 2.0 * third}};
        }
        case 4:
            return {RegionRect{0.0, 0.5, 0.0, 0.5}, RegionRect{0.0, 0.5, 0.5, 0.5}, RegionRect{0.5, 0.5, 0.0, 0.5},
                    RegionRect{0.5, 0.5, 0.5, 0.5}};
        default: throw ValidationError("k = " + std::to_string(k) + " exceeds the layout capacity of 4", "k");
    }
}

SceneSpec draw_scene(const SceneSuite& suite, NoiseStream& rng) {
    const std::size_t k = suite.k_min + draw_below(rng, suite.k_max - suite.k_min + 1);
    const std::vector<RegionRect> rects = layout_rects(k, rng);
    std::vector<Word> palette(color_words().begin(), color_words().end());
    SceneSpec scene;
    scene.canvas_height = scene.canvas_width = suite.canvas;
    scene.location_hints = suite.hints;
    const std::size_t vivid_slot = draw_below(rng, k);
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(palette[i], palette[i + draw_below(rng, palette.size() - i)]);
        const Word color = palette[i];
        const Word pattern = draw_below(rng, 2) == 0 ? Word::kSolid : Word::kStriped;
        RegionSpec region;
        region.rect = region.refine_rect = rects[i];
        region.fundamental = {Token{color}, Token{pattern}};
        std::optional<Word> modifier;
        if (suite.modifiers == ModifierPolicy::kUniform) {
            constexpr std::array<std::optional<Word>, 4> kChoices{std::nullopt, Word::kLight, Word::kDark,
                                                                  Word::kVivid};
            modifier = kChoices[draw_below(rng, kChoices.size())];
        } else if (suite.modifiers == ModifierPolicy::kVivid && i == vivid_slot) {
            modifier = Word::kVivid;
        }
        region.descriptive = region.fundamental;
        if (modifier) region.descriptive.insert(region.descriptive.begin(), Token{*modifier});
        scene.regions.push_back(std::move(region));
    }
    finalize_scene(scene);
    return scene;
}

}  // namespace

std::vector<SceneSpec> generate_suite(const SceneSuite& suite) {
    if (suite.count == 0) throw ValidationError("suite count must be at least 1", "count");
    if (suite.k_min == 0 || suite.k_min > suite.k_max) throw ValidationError("invalid k range", "k");
    if (suite.k_max > 4) {
        throw ValidationError("k = " + std::to_string(suite.k_max) + " exceeds the layout capacity of 4", "k");
    }
    if (suite.canvas < 4 || suite.canvas > 4096) throw ValidationError("canvas must be 4..4096 pixels", "canvas");
    NoiseStream rng(mix_seed(suite.seed));
    std::vector<SceneSpec> scenes;
    std::set<std::string> seen;
    constexpr std::size_t kMaxRejections = 10000;
    std::size_t rejections = 0;
    while (scenes.size() < suite.count) {
        SceneSpec scene = draw_scene(suite, rng);
        if (!seen.insert(serialize_scene(scene)).second) {
            if (++rejections > kMaxRejections) {
                throw ValidationError("suite '" + suite.name + "' cannot produce " + std::to_string(suite.count) +
                                          " distinct scenes",
                                      "count");
            }
            continue;
        }
        rejections = 0;
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

bool MetricsRow::same_metrics(const MetricsRow& o) const {
    return strategy == o.strategy && suite == o.suite && n == o.n && color_error == o.color_error &&
           assignment_accuracy == o.assignment_accuracy && seam_score == o.seam_score &&
           modifier_fidelity == o.modifier_fidelity;
}

MetricsRow aggregate(const std::string& label, const std::string& suite, const std::vector<SceneResult>& results) {
    MetricsRow row;
    row.strategy = label;
    row.suite = suite;
    row.n = results.size();
    std::size_t regions = 0;
    std::size_t correct = 0;
    std::size_t modifier_scenes = 0;
    for (const SceneResult& r : results) {
        row.color_error += r.score.color_error;
        row.seam_score += r.score.seam_score;
        row.runtime_ms += r.runtime_ms;
        regions += r.score.regions;
        correct += r.score.correct;
        if (r.score.modifier_regions > 0) {
            row.modifier_fidelity += r.score.modifier_fidelity;
            ++modifier_scenes;
        }
    }
    if (!results.empty()) {
        row.color_error /= static_cast<double>(results.size());
        row.seam_score /= static_cast<double>(results.size());
    }
    if (regions > 0) row.assignment_accuracy = static_cast<double>(correct) / static_cast<double>(regions);
    if (modifier_scenes > 0) row.modifier_fidelity /= static_cast<double>(modifier_scenes);
    return row;
}

BenchResult run_arms(const std::string& suite_name, const std::vector<SceneSpec>& scenes,
                     const std::vector<BenchArm>& arms, const BenchOptions& options) {
    BenchResult out;
    const std::size_t n = scenes.size();
    out.scenes.resize(arms.size() * n);
    parallel_for(out.scenes.size(), options.jobs, [&](std::size_t cell) {
        const BenchArm& arm = arms[cell / n];
        const std::size_t s = cell % n;
        const auto start = std::chrono::steady_clock::now();
        Trajectory trajectory = sample(scenes[s], arm.config);
        const auto stop = std::chrono::steady_clock::now();
        SceneResult& result = out.scenes[cell];
        result.scene = s;
        result.label = arm.label;
        result.score = score(trajectory.final_latent(), scenes[s]);
        result.runtime_ms =
            options.timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
        if (options.keep_images) result.image = std::move(trajectory.snapshots.back().latent);
    });
    for (std::size_t a = 0; a < arms.size(); ++a) {
        std::vector<SceneResult> slice(out.scenes.begin() + static_cast<std::ptrdiff_t>(a * n),
                                       out.scenes.begin() + static_cast<std::ptrdiff_t>((a + 1) * n));
        out.rows.push_back(aggregate(arms[a].label, suite_name, slice));
    }
    return out;
}

BenchResult run_benchmark(const SceneSuite& suite, const std::vector<Strategy>& strategies,
                          const SamplerConfig& config, const BenchOptions& options) {
    config.validate();
    const std::vector<SceneSpec> scenes = generate_suite(suite);
    std::vector<BenchArm> arms;
    for (Strategy s : strategies) {
        SamplerConfig c = config;
        c.strategy = s;
        arms.push_back({std::string(to_string(s)), c});
    }
    return run_arms(suite.name, scenes, arms, options);
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out(kMetricsHeader);
    out.push_back('\n');
    for (const MetricsRow& r : rows) {
        out += r.strategy + "," + r.suite + "," + std::to_string(r.n) + "," + shortest(r.color_error) + "," +
               shortest(r.assignment_accuracy) + "," + shortest(r.seam_score) + "," + shortest(r.modifier_fidelity) +
               "," + shortest(r.runtime_ms) + "\n";
    }
    return out;
}

namespace {

double parse_double_field(std::string_view s, std::size_t line) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ValidationError("metrics csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::vector<MetricsRow> parse_metrics_csv(std::string_view text) {
    std::vector<MetricsRow> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1) {
            if (line != kMetricsHeader) throw ValidationError("metrics csv: unexpected header");
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            f.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (f.size() != 8) throw ValidationError("metrics csv line " + std::to_string(line_no) + ": expected 8 fields");
        MetricsRow r;
        r.strategy = std::string(f[0]);
        r.suite = std::string(f[1]);
        auto res = std::from_chars(f[2].data(), f[2].data() + f[2].size(), r.n);
        if (res.ec != std::errc{} || res.ptr != f[2].data() + f[2].size()) {
            throw ValidationError("metrics csv line " + std::to_string(line_no) + ": bad count");
        }
        r.color_error = parse_double_field(f[3], line_no);
        r.assignment_accuracy = parse_double_field(f[4], line_no);
        r.seam_score = parse_double_field(f[5], line_no);
        r.modifier_fidelity = parse_double_field(f[6], line_no);
        r.runtime_ms = parse_double_field(f[7], line_no);
        rows.push_back(std::move(r));
    }
    if (line_no == 0) throw ValidationError("metrics csv: missing header");
    return rows;
}

std::string metrics_table(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(28) << "strategy" << std::setw(12) << "suite" << std::right << std::setw(6) << "n"
        << std::setw(12) << "color_err" << std::setw(12) << "assign" << std::setw(12) << "seam" << std::setw(12)
        << "modifier" << std::setw(12) << "ms" << "\n";
    out << std::fixed;
    for (const MetricsRow& r : rows) {
        out << std::left << std::setw(28) << r.strategy << std::setw(12) << r.suite << std::right << std::setw(6)
            << r.n << std::setprecision(4) << std::setw(12) << r.color_error << std::setw(12)
            << r.assignment_accuracy << std::setw(12) << r.seam_score << std::setw(12) << r.modifier_fidelity
            << std::setprecision(1) << std::setw(12) << r.runtime_ms << "\n";
    }
    return out.str();
}

std::vector<std::string> emit_report(const std::string& dir, const BenchResult& result,
                                     const std::vector<SceneSpec>& scenes) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw StorageError("cannot create '" + dir + "': " + ec.message());
    std::vector<std::string> written;
    const std::string csv = (std::filesystem::path(dir) / "metrics.csv").string();
    write_file(csv, metrics_csv(result.rows));
    written.push_back(csv);
    const std::string table = (std::filesystem::path(dir) / "metrics.txt").string();
    write_file(table, metrics_table(result.rows));
    written.push_back(table);
    for (const SceneResult& r : result.scenes) {
        if (r.image.empty()) continue;
        std::string label = r.label;
        for (char& ch : label) {
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-' && ch != '.') ch = '_';
        }
        std::array<char, 16> idx{};
        std::snprintf(idx.data(), idx.size(), "%04zu", r.scene);
        const std::string stem = (std::filesystem::path(dir) / ("scene" + std::string(idx.data()) + "_" + label)).string();
        const Image8 img = to_image8(r.image);
        write_file(stem + ".ppm", encode_ppm(img));
        write_file(stem + ".png", encode_png(img));
        written.push_back(stem + ".ppm");
        written.push_back(stem + ".png");
        if (r.scene < scenes.size()) {
            const std::string scene_path = (std::filesystem::path(dir) / ("scene" + std::string(idx.data()) + ".scene")).string();
            if (!std::filesystem::exists(scene_path)) {
                write_file(scene_path, scene_to_dsl(scenes[r.scene]));
                written.push_back(scene_path);
            }
        }
    }
    return written;
}

std::vector<std::size_t> default_r_values(std::size_t steps) { return {0, steps / 4, steps / 2, steps}; }

std::vector<double> default_deltas() { return {0.0, 0.25, 0.5, 0.8, 1.0}; }

AblationResult run_ablation(const SceneSuite& suite, const SamplerConfig& config, std::vector<std::size_t> r_values,
                            std::vector<double> deltas, const BenchOptions& options) {
    if (r_values.empty() || deltas.empty()) throw ValidationError("ablation needs at least one r and one delta");
    const std::vector<SceneSpec> scenes = generate_suite(suite);
    std::vector<BenchArm> arms;
    for (std::size_t r : r_values) {
        for (double d : deltas) {
            SamplerConfig c = config;
            c.strategy = Strategy::kRagFull;
            c.bind_steps = r;
            c.delta = d;
            c.validate();
            arms.push_back({"rag_full[r=" + std::to_string(r) + ";delta=" + shortest(d) + "]", c});
        }
    }
    BenchOptions opts = options;
    opts.keep_images = true;
    AblationResult out;
    out.r_values = r_values;
    out.deltas = deltas;
    out.bench = run_arms(suite.name, scenes, arms, opts);
    std::vector<Image8> tiles;
    for (std::size_t a = 0; a < arms.size(); ++a) {
        out.cells.push_back({arms[a].config.bind_steps, arms[a].config.delta, out.bench.rows[a]});
        tiles.push_back(to_image8(out.bench.scenes[a * scenes.size()].image));
    }
    out.sheet = contact_sheet(tiles, deltas.size());
    if (!options.keep_images) {
        for (SceneResult& r : out.bench.scenes) r.image = LatentGrid();
    }
    return out;
}

}  // namespace regioncomp
