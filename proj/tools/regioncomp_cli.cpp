// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "regioncomp/bench.hpp"
#include "regioncomp/config_json.hpp"
#include "regioncomp/error.hpp"
#include "regioncomp/image_io.hpp"
#include "regioncomp/run_store.hpp"
#include "regioncomp/service.hpp"

using namespace regioncomp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct SamplerFlags {
    std::string strategy = "rag_full";
    std::size_t steps = 20;
    std::size_t bind_steps = 5;
    double delta = 0.8;
    double guidance = 3.5;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool content_queries = false;

    void add(CLI::App* app, bool with_strategy = true) {
        if (with_strategy) {
            std::vector<std::string> names;
            for (Strategy s : all_strategies()) names.emplace_back(to_string(s));
            app->add_option("--strategy", strategy, "sampling strategy")->check(CLI::IsMember(names));
        }
        app->add_option("--steps", steps, "denoising steps T")->check(CLI::Range(1, 10000));
        app->add_option("--bind-steps", bind_steps, "hard-binding steps r")->check(CLI::Range(0, 10000));
        app->add_option("--delta", delta, "refinement blend weight")->check(CLI::Range(0.0, 1.0));
        app->add_option("--guidance", guidance, "guidance scale")->check(CLI::Range(0.0, 1e6));
        app->add_option("--seed", seed, "noise seed");
        app->add_option("--threads", threads, "attention worker threads")->check(CLI::Range(1, 256));
        app->add_flag("--content-queries", content_queries, "let queries read the latent colour");
    }

    SamplerConfig config() const {
        SamplerConfig c;
        c.strategy = *parse_strategy(strategy);
        c.steps = steps;
        c.bind_steps = bind_steps;
        c.delta = delta;
        c.guidance = guidance;
        c.seed = seed;
        c.threads = threads;
        c.content_queries = content_queries;
        c.validate();
        return c;
    }
};

struct Output {
    std::string format = "text";

    void add(CLI::App* app) {
        app->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));
    }
    bool json_mode() const { return format == "json"; }
};

RegionRect parse_rect_flag(const std::string& text) {
    std::vector<double> v;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ValidationError("mask rect must be four numbers y_off,y_scale,x_off,x_scale", "mask_rect");
        }
    }
    if (v.size() != 4) throw ValidationError("mask rect must be four numbers y_off,y_scale,x_off,x_scale", "mask_rect");
    RegionRect r{v[0], v[1], v[2], v[3]};
    const std::string why = rect_violation(r);
    if (!why.empty()) throw ValidationError("mask rect: " + why, "mask_rect");
    return r;
}

SceneSpec load_scene(const std::string& path, const std::string& inline_dsl) {
    if (!path.empty() && !inline_dsl.empty()) throw ValidationError("give --scene or --prompt, not both", "scene");
    if (!inline_dsl.empty()) return parse_scene(inline_dsl);
    if (path.empty()) throw ValidationError("a scene is required (--scene FILE or --prompt DSL)", "scene");
    const std::string text = read_file(path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") return parse_scene_document(text);
    return parse_scene(text);
}

void copy_images(RunStore& store, const std::string& run_id, const std::string& out_dir) {
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "image.ppm").string(), store.image(run_id, ImageFormat::kPpm));
    write_file((fs::path(out_dir) / "image.png").string(), store.image(run_id, ImageFormat::kPng));
}

StepObserver make_observer(bool trace, const std::string& dump_dir) {
    if (!trace && dump_dir.empty()) return {};
    if (!dump_dir.empty()) fs::create_directories(dump_dir);
    return [trace, dump_dir](const StepEvent& event, const SamplerRun& run) {
        if (trace) std::cerr << format_step_event(event) << "\n";
        if (!dump_dir.empty()) {
            const std::string stem = (fs::path(dump_dir) / ("step" + std::to_string(event.step + 1))).string();
            write_latent_file(stem + ".rclt", run.latent());
            write_file(stem + ".ppm", encode_ppm(to_image8(run.latent())));
        }
    };
}

void report_run(const RunRecord& r, const Output& out, const std::string& out_dir) {
    if (out.json_mode()) {
        std::cout << json{{"run_id", r.run_id},
                          {"status", std::string(to_string(r.status))},
                          {"ppm_sha256", r.ppm_sha256},
                          {"out", out_dir},
                          {"warnings", r.warnings}}
                         .dump()
                  << "\n";
    } else {
        for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << r.run_id << "\n";
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regional compositional sampling over a closed-form toy diffusion model"};
    app.require_subcommand(1);
    std::optional<std::string> store_flag;

    // generate
    auto* gen = app.add_subcommand("generate", "sample a scene and store the run");
    SamplerFlags gen_flags;
    Output gen_out;
    std::string gen_scene, gen_prompt, gen_dir = ".", gen_dump;
    bool gen_trace = false;
    gen->add_option("--scene", gen_scene, "scene file (DSL, or JSON when it ends in .json)");
    gen->add_option("--prompt", gen_prompt, "inline scene DSL");
    gen->add_option("--out", gen_dir, "directory for image.ppm / image.png");
    gen->add_option("--store", store_flag, "run store directory");
    gen->add_flag("--trace", gen_trace, "log one line per step to stderr");
    gen->add_option("--dump-steps", gen_dump, "write every intermediate latent to this directory");
    gen_flags.add(gen);
    gen_out.add(gen);

    // repaint
    auto* rep = app.add_subcommand("repaint", "repaint a region of a stored run");
    Output rep_out;
    std::string rep_run, rep_base, rep_detail, rep_mask, rep_dir = ".";
    std::optional<std::size_t> rep_region;
    std::optional<std::uint64_t> rep_nonce;
    rep->add_option("--run", rep_run, "parent run id")->required();
    rep->add_option("--region", rep_region, "region index to repaint");
    rep->add_option("--base", rep_base, "new fundamental tokens");
    rep->add_option("--detail", rep_detail, "new descriptive tokens");
    rep->add_option("--nonce", rep_nonce, "noise nonce (default: number of children + 1)");
    rep->add_option("--mask-rect", rep_mask, "explicit mask y_off,y_scale,x_off,x_scale");
    rep->add_option("--out", rep_dir, "directory for image.ppm / image.png");
    rep->add_option("--store", store_flag, "run store directory");
    rep_out.add(rep);

    // bench
    auto* bench = app.add_subcommand("bench", "score strategies over a scene suite");
    SamplerFlags bench_flags;
    Output bench_out;
    std::string bench_suite = "ambiguous3", bench_strategies = "global_only,hard_only,soft_only,rag_full,latent_average",
                bench_dir;
    std::optional<std::size_t> bench_count;
    std::uint64_t bench_suite_seed = 1;
    unsigned bench_jobs = 1;
    bool bench_no_timing = false, bench_images = false;
    bench->add_option("--suite", bench_suite, "suite name")->check(CLI::IsMember(suite_names()));
    bench->add_option("--count", bench_count, "number of scenes")->check(CLI::Range(1, 100000));
    bench->add_option("--suite-seed", bench_suite_seed, "suite generator seed");
    bench->add_option("--strategies", bench_strategies, "comma-separated strategies");
    bench->add_option("--out", bench_dir, "report directory");
    bench->add_option("--jobs", bench_jobs, "parallel scene jobs")->check(CLI::Range(1, 256));
    bench->add_flag("--no-timing", bench_no_timing, "write runtime_ms = 0 for byte-stable reports");
    bench->add_flag("--images", bench_images, "also write per-scene images");
    bench_flags.add(bench, false);
    bench_out.add(bench);

    // ablate
    auto* abl = app.add_subcommand("ablate", "sweep bind steps and delta");
    SamplerFlags abl_flags;
    Output abl_out;
    std::string abl_suite = "ambiguous3", abl_r, abl_delta, abl_dir = "ablation";
    std::optional<std::size_t> abl_count;
    std::uint64_t abl_suite_seed = 1;
    unsigned abl_jobs = 1;
    bool abl_no_timing = false;
    abl->add_option("--suite", abl_suite, "suite name")->check(CLI::IsMember(suite_names()));
    abl->add_option("--count", abl_count, "number of scenes")->check(CLI::Range(1, 100000));
    abl->add_option("--suite-seed", abl_suite_seed, "suite generator seed");
    abl->add_option("--r", abl_r, "comma-separated bind steps (default 0,T/4,T/2,T)");
    abl->add_option("--deltas", abl_delta, "comma-separated deltas (default 0,0.25,0.5,0.8,1)");
    abl->add_option("--out", abl_dir, "output directory");
    abl->add_option("--jobs", abl_jobs, "parallel scene jobs")->check(CLI::Range(1, 256));
    abl->add_flag("--no-timing", abl_no_timing, "write runtime_ms = 0");
    abl_flags.add(abl, false);
    abl_out.add(abl);

    // serve
    auto* serve = app.add_subcommand("serve", "run the HTTP API");
    ServiceOptions serve_opts;
    std::size_t serve_queue = 0;
    unsigned serve_workers = 1;
    Output serve_out;
    serve->add_option("--host", serve_opts.host, "bind address");
    serve->add_option("--port", serve_opts.port, "port (0 picks one)")->check(CLI::Range(0, 65535));
    serve->add_option("--store", store_flag, "run store directory");
    serve->add_option("--static", serve_opts.static_dir, "directory of UI assets served at /");
    serve->add_option("--queue", serve_queue, "bounded queue length for async runs (0 = synchronous)");
    serve->add_option("--workers", serve_workers, "queue workers")->check(CLI::Range(1, 64));
    serve_out.add(serve);

    // inspect
    auto* insp = app.add_subcommand("inspect", "print a stored run, a scene or the vocabulary");
    Output insp_out;
    std::string insp_run, insp_scene;
    bool insp_vocab = false, insp_lineage = false;
    insp->add_option("run_id", insp_run, "run to print");
    insp->add_option("--scene", insp_scene, "parse a scene file and print it");
    insp->add_flag("--vocab", insp_vocab, "print the token vocabulary");
    insp->add_flag("--lineage", insp_lineage, "print the run's ancestry instead of its record");
    insp->add_option("--store", store_flag, "run store directory");
    insp_out.add(insp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*gen) {
            const SceneSpec scene = load_scene(gen_scene, gen_prompt);
            const SamplerConfig config = gen_flags.config();
            if (gen_trace || !gen_dump.empty()) {
                // The store samples on its own; replay here for the step log.
                sample(scene, config, make_observer(gen_trace, gen_dump));
            }
            RunStore store(resolve_store_root(store_flag));
            const RunRecord r = store.create_run(scene, config);
            if (r.status != RunStatus::kDone) throw Error("run_failed", r.error);
            copy_images(store, r.run_id, gen_dir);
            report_run(r, gen_out, gen_dir);
        } else if (*rep) {
            RunStore store(resolve_store_root(store_flag));
            RepaintRequest req;
            req.region = rep_region;
            req.nonce = rep_nonce;
            if (!rep_mask.empty()) req.mask_rect = parse_rect_flag(rep_mask);
            if (!rep_base.empty()) req.base = parse_token_list(rep_base);
            if (!rep_detail.empty()) req.detail = parse_token_list(rep_detail);
            const RunRecord r = store.create_repaint(rep_run, req);
            if (r.status != RunStatus::kDone) throw Error("run_failed", r.error);
            copy_images(store, r.run_id, rep_dir);
            report_run(r, rep_out, rep_dir);
        } else if (*bench) {
            std::vector<Strategy> strategies;
            for (const std::string& name : split_list(bench_strategies)) {
                auto s = parse_strategy(name);
                if (!s) throw ValidationError("unknown strategy '" + name + "'", "strategies");
                strategies.push_back(*s);
            }
            const SceneSuite suite = named_suite(bench_suite, bench_count, bench_suite_seed);
            BenchOptions opts{bench_jobs, !bench_no_timing, bench_images};
            const BenchResult result = run_benchmark(suite, strategies, bench_flags.config(), opts);
            if (!bench_dir.empty()) emit_report(bench_dir, result, bench_images ? generate_suite(suite) : std::vector<SceneSpec>{});
            if (bench_out.json_mode()) {
                json rows = json::array();
                for (const MetricsRow& r : result.rows) {
                    rows.push_back({{"strategy", r.strategy}, {"suite", r.suite}, {"n", r.n},
                                    {"color_error", r.color_error}, {"assignment_accuracy", r.assignment_accuracy},
                                    {"seam_score", r.seam_score}, {"modifier_fidelity", r.modifier_fidelity},
                                    {"runtime_ms", r.runtime_ms}});
                }
                std::cout << json{{"rows", rows}}.dump() << "\n";
            } else {
                std::cout << metrics_table(result.rows);
            }
        } else if (*abl) {
            const SamplerConfig base = abl_flags.config();
            std::vector<std::size_t> rs = default_r_values(base.steps);
            std::vector<double> ds = default_deltas();
            if (!abl_r.empty()) {
                rs.clear();
                for (const std::string& s : split_list(abl_r)) rs.push_back(std::stoul(s));
            }
            if (!abl_delta.empty()) {
                ds.clear();
                for (const std::string& s : split_list(abl_delta)) ds.push_back(std::stod(s));
            }
            const SceneSuite suite = named_suite(abl_suite, abl_count, abl_suite_seed);
            BenchOptions opts{abl_jobs, !abl_no_timing, false};
            const AblationResult result = run_ablation(suite, base, rs, ds, opts);
            fs::create_directories(abl_dir);
            write_file((fs::path(abl_dir) / "metrics.csv").string(), metrics_csv(result.bench.rows));
            write_file((fs::path(abl_dir) / "contact_sheet.ppm").string(), encode_ppm(result.sheet));
            write_file((fs::path(abl_dir) / "contact_sheet.png").string(), encode_png(result.sheet));
            if (abl_out.json_mode()) {
                json cells = json::array();
                for (const AblationCell& c : result.cells) {
                    cells.push_back({{"bind_steps", c.bind_steps}, {"delta", c.delta},
                                     {"assignment_accuracy", c.row.assignment_accuracy},
                                     {"color_error", c.row.color_error}, {"seam_score", c.row.seam_score}});
                }
                std::cout << json{{"cells", cells}, {"out", abl_dir}}.dump() << "\n";
            } else {
                std::cout << metrics_table(result.bench.rows);
            }
        } else if (*serve) {
            RunStore store(resolve_store_root(store_flag), StoreOptions{serve_queue, serve_workers});
            Service service(store, serve_opts);
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            const int port = service.start();
            if (serve_out.json_mode()) {
                std::cout << json{{"host", serve_opts.host}, {"port", port}, {"store", store.root().string()}}.dump()
                          << std::endl;
            } else {
                std::cout << "listening on http://" << serve_opts.host << ":" << port << " (store "
                          << store.root().string() << ")" << std::endl;
            }
            while (g_stop == 0) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            service.stop();
        } else if (*insp) {
            if (insp_vocab) {
                if (insp_out.json_mode()) {
                    std::cout << vocabulary_json().dump(2) << "\n";
                } else {
                    std::cout << vocabulary_table();
                }
            } else if (!insp_scene.empty()) {
                const SceneSpec scene = load_scene(insp_scene, "");
                std::cout << (insp_out.json_mode() ? serialize_scene(scene) + "\n" : scene_to_dsl(scene));
            } else if (!insp_run.empty()) {
                RunStore store(resolve_store_root(store_flag));
                if (insp_lineage) {
                    const auto chain = store.lineage(insp_run);
                    if (insp_out.json_mode()) {
                        std::cout << json(chain).dump() << "\n";
                    } else {
                        for (const auto& id : chain) std::cout << id << "\n";
                    }
                } else {
                    std::cout << store.record_text(insp_run);
                }
            } else {
                throw ValidationError("inspect needs a run id, --scene or --vocab");
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const bool user_error = dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
                                dynamic_cast<const NotFoundError*>(&e);
        return user_error ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
