// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "regioncomp/repaint.hpp"
#include "regioncomp/sampler.hpp"
#include "regioncomp/scene.hpp"

namespace regioncomp {

enum class RunStatus { kPending, kDone, kFailed };

std::string_view to_string(RunStatus status) noexcept;

struct RunRecord {
    std::string run_id;
    std::string created_at;  ///< UTC, ISO 8601
    std::uint64_t sequence = 0;
    SceneSpec scene;  ///< scene of this run; the edited scene for repaints
    SamplerConfig config;
    std::optional<std::string> parent_run;
    std::uint64_t repaint_nonce = 0;
    /// Mask of this repaint; absent for root runs and empty-mask repaints.
    std::optional<Mask> repaint_mask;
    RunStatus status = RunStatus::kPending;
    std::string error;
    std::string ppm_sha256;
    std::string png_sha256;
    std::vector<std::string> warnings;
};

nlohmann::json record_to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& doc);

enum class ImageFormat { kPpm, kPng };

struct StoreOptions {
    /// 0 runs every job synchronously; otherwise the bounded queue length for async jobs.
    std::size_t queue_capacity = 0;
    unsigned workers = 1;
};

/// Directory-per-run store:
///   <root>/<run_id>/record     JSON record
///   <root>/<run_id>/image.ppm
///   <root>/<run_id>/image.png
/// Files are replaced by rename so readers never see partial writes.
class RunStore {
public:
    explicit RunStore(std::filesystem::path root, StoreOptions options = {});
    ~RunStore();

    RunStore(const RunStore&) = delete;
    RunStore& operator=(const RunStore&) = delete;

    const std::filesystem::path& root() const noexcept { return m_root; }

    /// Validates, persists and samples. With `async` and a queue configured the record
    /// is returned pending and sampling happens on a worker; BusyError when full.
    RunRecord create_run(const SceneSpec& scene, const SamplerConfig& config, bool async = false);

    /// Child run of a finished run. A missing nonce becomes (children of parent) + 1.
    RunRecord create_repaint(const std::string& parent_id, const RepaintRequest& request, bool async = false);

    /// Throws NotFoundError.
    RunRecord get(const std::string& run_id) const;
    /// Creation order.
    std::vector<RunRecord> list() const;
    std::string image(const std::string& run_id, ImageFormat format) const;
    /// The stored record file, byte for byte.
    std::string record_text(const std::string& run_id) const;
    /// Run ids from the root of the chain to `run_id`.
    std::vector<std::string> lineage(const std::string& run_id) const;
    /// Replayable description of a run and its ancestors.
    Lineage lineage_spec(const std::string& run_id) const;
    std::vector<std::string> children(const std::string& run_id) const;

    /// Blocks until the queue is empty and no job is running.
    void wait_idle();

private:
    struct Job {
        std::string run_id;
    };

    std::filesystem::path run_dir(const std::string& run_id) const;
    std::pair<std::string, std::uint64_t> allocate_id(std::string_view inputs);
    void write_record(const RunRecord& record) const;
    void execute(const std::string& run_id) noexcept;
    RunRecord persist_new(RunRecord record, bool async);
    void worker_loop();

    std::filesystem::path m_root;
    StoreOptions m_options;
    std::mutex m_id_mutex;
    std::uint64_t m_next_sequence = 0;

    std::mutex m_queue_mutex;
    std::condition_variable m_queue_cv;
    std::condition_variable m_idle_cv;
    std::deque<Job> m_queue;
    std::size_t m_running = 0;
    bool m_stopping = false;
    std::vector<std::thread> m_workers;
};

/// Store root: explicit flag, else $REGIONCOMP_STORE, else ./runs.
std::filesystem::path resolve_store_root(const std::optional<std::string>& flag);

}  // namespace regioncomp
