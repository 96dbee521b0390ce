// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/run_store.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <tuple>
#include <unistd.h>

#include "regioncomp/config_json.hpp"
#include "regioncomp/error.hpp"
#include "regioncomp/image_io.hpp"

namespace regioncomp {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(RunStatus status) noexcept {
    switch (status) {
        case RunStatus::kPending: return "pending";
        case RunStatus::kDone: return "done";
        case RunStatus::kFailed: return "failed";
    }
    return "unknown";
}

namespace {

RunStatus parse_status(const std::string& s) {
    if (s == "pending") return RunStatus::kPending;
    if (s == "done") return RunStatus::kDone;
    if (s == "failed") return RunStatus::kFailed;
    throw StorageError("record has unknown status '" + s + "'");
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

bool valid_run_id(const std::string& id) {
    return id.size() == 32 && std::all_of(id.begin(), id.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

void atomic_write(const fs::path& path, std::string_view bytes) {
    const fs::path tmp = path.string() + ".tmp";
    write_file(tmp.string(), bytes);
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw StorageError("cannot replace '" + path.string() + "': " + ec.message());
}

}  // namespace

json record_to_json(const RunRecord& r) {
    json doc{{"run_id", r.run_id},
             {"created_at", r.created_at},
             {"sequence", r.sequence},
             {"status", std::string(to_string(r.status))},
             {"scene", scene_to_json(r.scene)},
             {"config", config_to_json(r.config)},
             {"parent_run", r.parent_run ? json(*r.parent_run) : json(nullptr)},
             {"repaint_nonce", r.repaint_nonce},
             {"repaint_mask", r.repaint_mask ? mask_to_json(*r.repaint_mask) : json(nullptr)},
             {"image", {{"ppm_sha256", r.ppm_sha256}, {"png_sha256", r.png_sha256}}},
             {"warnings", r.warnings}};
    if (!r.error.empty()) doc["error"] = r.error;
    return doc;
}

RunRecord record_from_json(const json& doc) {
    try {
        RunRecord r;
        r.run_id = doc.at("run_id").get<std::string>();
        r.created_at = doc.at("created_at").get<std::string>();
        r.sequence = doc.at("sequence").get<std::uint64_t>();
        r.status = parse_status(doc.at("status").get<std::string>());
        r.scene = scene_from_json(doc.at("scene"));
        r.config = config_from_json(doc.at("config"));
        if (!doc.at("parent_run").is_null()) r.parent_run = doc.at("parent_run").get<std::string>();
        r.repaint_nonce = doc.at("repaint_nonce").get<std::uint64_t>();
        if (!doc.at("repaint_mask").is_null()) {
            r.repaint_mask =
                mask_from_json(doc.at("repaint_mask"), r.scene.canvas_height, r.scene.canvas_width, "repaint_mask");
        }
        r.ppm_sha256 = doc.at("image").at("ppm_sha256").get<std::string>();
        r.png_sha256 = doc.at("image").at("png_sha256").get<std::string>();
        r.warnings = doc.at("warnings").get<std::vector<std::string>>();
        if (doc.contains("error")) r.error = doc.at("error").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw StorageError(std::string("corrupt run record: ") + e.what());
    } catch (const ValidationError& e) {
        throw StorageError(std::string("corrupt run record: ") + e.what());
    }
}

RunStore::RunStore(fs::path root, StoreOptions options) : m_root(std::move(root)), m_options(options) {
    std::error_code ec;
    fs::create_directories(m_root, ec);
    if (ec) throw StorageError("cannot create store '" + m_root.string() + "': " + ec.message());
    for (const RunRecord& r : list()) m_next_sequence = std::max(m_next_sequence, r.sequence + 1);
    if (m_options.queue_capacity > 0) {
        for (unsigned i = 0; i < std::max(1u, m_options.workers); ++i) m_workers.emplace_back([this] { worker_loop(); });
    }
}

RunStore::~RunStore() {
    {
        std::lock_guard lock(m_queue_mutex);
        m_stopping = true;
    }
    m_queue_cv.notify_all();
    for (auto& t : m_workers) t.join();
}

fs::path RunStore::run_dir(const std::string& run_id) const {
    if (!valid_run_id(run_id)) throw NotFoundError("unknown run '" + run_id + "'");
    return m_root / run_id;
}

std::pair<std::string, std::uint64_t> RunStore::allocate_id(std::string_view inputs) {
    std::lock_guard lock(m_id_mutex);
    while (true) {
        const std::uint64_t seq = m_next_sequence++;
        const auto ns = std::chrono::system_clock::now().time_since_epoch().count();
        std::string material(inputs);
        material += "|" + std::to_string(seq) + "|" + std::to_string(ns) + "|" + std::to_string(::getpid());
        const std::string id = sha256_hex(material).substr(0, 32);
        std::error_code ec;
        if (fs::create_directory(m_root / id, ec)) return {id, seq};
        if (ec) throw StorageError("cannot create run directory: " + ec.message());
    }
}

void RunStore::write_record(const RunRecord& record) const {
    atomic_write(m_root / record.run_id / "record", record_to_json(record).dump(2) + "\n");
}

RunRecord RunStore::persist_new(RunRecord record, bool async) {
    const std::string inputs = scene_to_json(record.scene).dump() + config_to_json(record.config).dump() +
                               record.parent_run.value_or("") + std::to_string(record.repaint_nonce);
    std::tie(record.run_id, record.sequence) = allocate_id(inputs);
    record.created_at = utc_now();
    record.status = RunStatus::kPending;
    write_record(record);

    if (async && m_options.queue_capacity > 0) {
        std::unique_lock lock(m_queue_mutex);
        if (m_queue.size() >= m_options.queue_capacity) {
            lock.unlock();
            record.status = RunStatus::kFailed;
            record.error = "run queue is full";
            write_record(record);
            throw BusyError("run queue is full (capacity " + std::to_string(m_options.queue_capacity) + ")");
        }
        m_queue.push_back({record.run_id});
        lock.unlock();
        m_queue_cv.notify_one();
        return record;
    }
    execute(record.run_id);
    return get(record.run_id);
}

RunRecord RunStore::create_run(const SceneSpec& scene, const SamplerConfig& config, bool async) {
    SceneSpec s = scene;
    finalize_scene(s);
    config.validate();
    RunRecord record;
    record.scene = std::move(s);
    record.config = config;
    return persist_new(std::move(record), async);
}

RunRecord RunStore::create_repaint(const std::string& parent_id, const RepaintRequest& request, bool async) {
    const RunRecord parent = get(parent_id);
    if (parent.status != RunStatus::kDone) {
        throw ValidationError("run '" + parent_id + "' is not finished", "run_id");
    }
    RepaintRequest req = request;
    if (!req.nonce) req.nonce = children(parent_id).size() + 1;
    const RepaintEdit edit = apply_edit(parent.scene, req);
    RunRecord record;
    record.scene = edit.scene;
    record.config = parent.config;
    record.parent_run = parent_id;
    record.repaint_nonce = edit.nonce;
    if (edit.mask.none()) {
        record.warnings.push_back("repaint mask is empty; image equals the parent run");
    } else {
        record.repaint_mask = edit.mask;
    }
    return persist_new(std::move(record), async);
}

void RunStore::execute(const std::string& run_id) noexcept {
    RunRecord record;
    try {
        record = get(run_id);
    } catch (...) {
        return;
    }
    try {
        const Trajectory trajectory = replay(lineage_spec(run_id));
        const Image8 img = to_image8(trajectory.final_latent());
        const std::string ppm = encode_ppm(img);
        const std::string png = encode_png(img);
        atomic_write(m_root / run_id / "image.ppm", ppm);
        atomic_write(m_root / run_id / "image.png", png);
        record.ppm_sha256 = sha256_hex(ppm);
        record.png_sha256 = sha256_hex(png);
        record.status = RunStatus::kDone;
    } catch (const std::exception& e) {
        record.status = RunStatus::kFailed;
        record.error = e.what();
    }
    try {
        write_record(record);
    } catch (...) {
    }
}

void RunStore::worker_loop() {
    while (true) {
        Job job;
        {
            std::unique_lock lock(m_queue_mutex);
            m_queue_cv.wait(lock, [this] { return m_stopping || !m_queue.empty(); });
            if (m_queue.empty()) return;
            job = std::move(m_queue.front());
            m_queue.pop_front();
            ++m_running;
        }
        execute(job.run_id);
        {
            std::lock_guard lock(m_queue_mutex);
            --m_running;
        }
        m_idle_cv.notify_all();
    }
}

void RunStore::wait_idle() {
    std::unique_lock lock(m_queue_mutex);
    m_idle_cv.wait(lock, [this] { return m_queue.empty() && m_running == 0; });
}

RunRecord RunStore::get(const std::string& run_id) const {
    const fs::path path = run_dir(run_id) / "record";
    std::error_code ec;
    if (!fs::exists(path, ec)) throw NotFoundError("unknown run '" + run_id + "'");
    json doc;
    try {
        doc = json::parse(read_file(path.string()));
    } catch (const json::exception& e) {
        throw StorageError("corrupt run record '" + run_id + "': " + e.what());
    }
    return record_from_json(doc);
}

std::vector<RunRecord> RunStore::list() const {
    std::vector<RunRecord> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(m_root, ec)) {
        const std::string name = entry.path().filename().string();
        if (!valid_run_id(name) || !fs::exists(entry.path() / "record")) continue;
        out.push_back(get(name));
    }
    std::sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) { return a.sequence < b.sequence; });
    return out;
}

std::string RunStore::image(const std::string& run_id, ImageFormat format) const {
    const RunRecord record = get(run_id);
    if (record.status != RunStatus::kDone) throw NotFoundError("run '" + run_id + "' has no image yet");
    return read_file((run_dir(run_id) / (format == ImageFormat::kPng ? "image.png" : "image.ppm")).string());
}

std::string RunStore::record_text(const std::string& run_id) const {
    const fs::path path = run_dir(run_id) / "record";
    std::error_code ec;
    if (!fs::exists(path, ec)) throw NotFoundError("unknown run '" + run_id + "'");
    return read_file(path.string());
}

std::vector<std::string> RunStore::lineage(const std::string& run_id) const {
    std::vector<std::string> chain;
    std::optional<std::string> cur = run_id;
    while (cur) {
        if (std::find(chain.begin(), chain.end(), *cur) != chain.end()) {
            throw StorageError("run lineage of '" + run_id + "' contains a cycle");
        }
        chain.push_back(*cur);
        cur = get(*cur).parent_run;
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

Lineage RunStore::lineage_spec(const std::string& run_id) const {
    const std::vector<std::string> chain = lineage(run_id);
    const RunRecord root = get(chain.front());
    Lineage out{root.scene, root.config, {}};
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const RunRecord r = get(chain[i]);
        if (r.repaint_mask) out.edits.push_back({r.scene, *r.repaint_mask, r.repaint_nonce});
    }
    return out;
}

std::vector<std::string> RunStore::children(const std::string& run_id) const {
    std::vector<std::string> out;
    for (const RunRecord& r : list()) {
        if (r.parent_run == run_id) out.push_back(r.run_id);
    }
    return out;
}

fs::path resolve_store_root(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv("REGIONCOMP_STORE"); env != nullptr && *env != '\0') return env;
    return "runs";
}

}  // namespace regioncomp
