// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "json.hpp"
#include "regioncomp/run_store.hpp"

namespace httplib {
class Server;
}

namespace regioncomp {

struct ServiceOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  ///< 0 picks a free port
    std::optional<std::string> static_dir;
};

/// {"error": {"code", "message", "position"?}} for any exception.
nlohmann::json error_body(const std::exception& error);
/// HTTP status for an exception raised by a handler.
int error_status(const std::exception& error);

/// Token vocabulary, strategies and default config for clients.
nlohmann::json vocabulary_json();

/// Registers the JSON API:
///   POST /api/runs                    {scene | dsl, config?, async?} -> {run_id, status}
///   GET  /api/runs                    {runs: [...]}
///   GET  /api/runs/{id}               record + lineage
///   GET  /api/runs/{id}/record        stored record verbatim
///   GET  /api/runs/{id}/image.png     (and image.ppm)
///   POST /api/runs/{id}/repaint       RepaintRequest document -> {run_id, status}
///   GET  /api/vocab
void install_routes(httplib::Server& server, RunStore& store);

/// An HTTP server over a store, listening on a background thread once started.
class Service {
public:
    Service(RunStore& store, ServiceOptions options);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and starts serving in the background; returns the bound port.
    int start();
    /// Binds and serves on the calling thread until stop().
    void run();
    void stop();

    int port() const noexcept { return m_port; }

private:
    int bind();

    RunStore& m_store;
    ServiceOptions m_options;
    std::unique_ptr<httplib::Server> m_server;
    std::thread m_thread;
    int m_port = -1;
};

}  // namespace regioncomp
