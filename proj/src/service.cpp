// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/service.hpp"

#include "httplib.h"
#include "regioncomp/config_json.hpp"
#include "regioncomp/error.hpp"
#include "regioncomp/vocab.hpp"

namespace regioncomp {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

std::string_view kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::kColor: return "color";
        case TokenKind::kPattern: return "pattern";
        case TokenKind::kModifier: return "modifier";
        case TokenKind::kLocation: return "location";
        case TokenKind::kNull: return "null";
    }
    return "unknown";
}

json summary(const RunRecord& r) {
    return json{{"run_id", r.run_id},
                {"created_at", r.created_at},
                {"sequence", r.sequence},
                {"status", std::string(to_string(r.status))},
                {"parent_run", r.parent_run ? json(*r.parent_run) : json(nullptr)},
                {"strategy", std::string(to_string(r.config.strategy))},
                {"seed", r.config.seed},
                {"global_prompt", join_tokens(r.scene.global_tokens)},
                {"ppm_sha256", r.ppm_sha256}};
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    return json::parse(req.body);
}

bool async_flag(const json& body) {
    if (!body.contains("async")) return false;
    if (!body["async"].is_boolean()) throw ValidationError("expected a boolean", "async");
    return body["async"].get<bool>();
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

template <typename Handler>
auto guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
        try {
            handler(req, res);
        } catch (const std::exception& e) {
            send_json(res, error_status(e), error_body(e));
        }
    };
}

SceneSpec scene_from_body(const json& body) {
    if (body.contains("dsl")) {
        if (!body["dsl"].is_string()) throw ValidationError("expected scene DSL text", "dsl");
        return parse_scene(body["dsl"].get<std::string>());
    }
    if (body.contains("scene")) return scene_from_json(body["scene"]);
    throw ValidationError("request needs a 'scene' document or 'dsl' text", "scene");
}

}  // namespace

json error_body(const std::exception& error) {
    json err{{"code", "internal"}, {"message", error.what()}};
    if (const auto* e = dynamic_cast<const Error*>(&error)) err["code"] = e->code();
    if (const auto* e = dynamic_cast<const ParseError*>(&error)) {
        err["message"] = e->detail();
        err["position"] = {{"line", e->position().line}, {"column", e->position().column}};
    } else if (const auto* e = dynamic_cast<const ValidationError*>(&error); e != nullptr && !e->path().empty()) {
        err["position"] = {{"path", e->path()}};
    } else if (const auto* e = dynamic_cast<const json::parse_error*>(&error)) {
        err["code"] = "bad_json";
        err["position"] = {{"byte", e->byte}};
    }
    return json{{"error", err}};
}

int error_status(const std::exception& error) {
    if (dynamic_cast<const NotFoundError*>(&error)) return 404;
    if (dynamic_cast<const BusyError*>(&error)) return 503;
    if (dynamic_cast<const ParseError*>(&error) || dynamic_cast<const ValidationError*>(&error) ||
        dynamic_cast<const ShapeError*>(&error) || dynamic_cast<const json::exception*>(&error)) {
        return 400;
    }
    return 500;
}

json vocabulary_json() {
    json tokens = json::array();
    for (Word w : all_words()) {
        const Token t{w};
        json entry{{"lexeme", std::string(t.lexeme())}, {"kind", std::string(kind_name(t.kind()))}};
        if (t.kind() == TokenKind::kColor) {
            const Rgb a = anchor_color(w);
            entry["anchor"] = {a[0], a[1], a[2]};
        }
        tokens.push_back(std::move(entry));
    }
    json strategies = json::array();
    for (Strategy s : all_strategies()) strategies.push_back(std::string(to_string(s)));
    return json{{"tokens", tokens}, {"strategies", strategies}, {"defaults", config_to_json(SamplerConfig{})}};
}

void install_routes(httplib::Server& server, RunStore& store) {
    server.Post("/api/runs", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                    const json body = parse_body(req);
                    if (!body.is_object()) throw ValidationError("expected a JSON object", "");
                    const SceneSpec scene = scene_from_body(body);
                    const SamplerConfig config =
                        config_from_json(body.contains("config") ? body["config"] : json(nullptr));
                    const RunRecord r = store.create_run(scene, config, async_flag(body));
                    send_json(res, r.status == RunStatus::kFailed ? 500 : 201,
                              json{{"run_id", r.run_id}, {"status", std::string(to_string(r.status))}});
                }));
    server.Get("/api/runs", guarded([&store](const httplib::Request&, httplib::Response& res) {
                   json runs = json::array();
                   for (const RunRecord& r : store.list()) runs.push_back(summary(r));
                   send_json(res, 200, json{{"runs", runs}});
               }));
    server.Get(R"(/api/runs/([0-9a-f]+))", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                   const std::string id = req.matches[1];
                   json doc = record_to_json(store.get(id));
                   doc["lineage"] = store.lineage(id);
                   doc["children"] = store.children(id);
                   send_json(res, 200, doc);
               }));
    server.Get(R"(/api/runs/([0-9a-f]+)/record)",
               guarded([&store](const httplib::Request& req, httplib::Response& res) {
                   res.set_content(store.record_text(req.matches[1]), kJson);
               }));
    server.Get(R"(/api/runs/([0-9a-f]+)/image\.(png|ppm))",
               guarded([&store](const httplib::Request& req, httplib::Response& res) {
                   const bool png = req.matches[2] == "png";
                   res.set_content(store.image(req.matches[1], png ? ImageFormat::kPng : ImageFormat::kPpm),
                                   png ? "image/png" : "image/x-portable-pixmap");
               }));
    server.Post(R"(/api/runs/([0-9a-f]+)/repaint)",
                guarded([&store](const httplib::Request& req, httplib::Response& res) {
                    const std::string id = req.matches[1];
                    json body = parse_body(req);
                    if (!body.is_object()) throw ValidationError("expected a JSON object", "");
                    const bool async = async_flag(body);
                    body.erase("async");
                    const RunRecord parent = store.get(id);
                    const RepaintRequest request = repaint_request_from_json(
                        body, parent.scene.canvas_height, parent.scene.canvas_width);
                    const RunRecord r = store.create_repaint(id, request, async);
                    json out{{"run_id", r.run_id}, {"status", std::string(to_string(r.status))}};
                    if (!r.warnings.empty()) out["warnings"] = r.warnings;
                    send_json(res, r.status == RunStatus::kFailed ? 500 : 201, out);
                }));
    server.Get("/api/vocab", guarded([](const httplib::Request&, httplib::Response& res) {
                   send_json(res, 200, vocabulary_json());
               }));
    server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, json{{"ok", true}});
    });
}

Service::Service(RunStore& store, ServiceOptions options)
    : m_store(store), m_options(std::move(options)), m_server(std::make_unique<httplib::Server>()) {
    install_routes(*m_server, m_store);
    if (m_options.static_dir && !m_server->set_mount_point("/", *m_options.static_dir)) {
        throw ValidationError("static directory '" + *m_options.static_dir + "' does not exist", "static");
    }
}

Service::~Service() { stop(); }

int Service::bind() {
    if (m_options.port == 0) {
        m_port = m_server->bind_to_any_port(m_options.host);
    } else {
        m_port = m_server->bind_to_port(m_options.host, m_options.port) ? m_options.port : -1;
    }
    if (m_port < 0) {
        throw StorageError("cannot bind " + m_options.host + ":" + std::to_string(m_options.port));
    }
    return m_port;
}

int Service::start() {
    bind();
    m_thread = std::thread([this] { m_server->listen_after_bind(); });
    m_server->wait_until_ready();
    return m_port;
}

void Service::run() {
    bind();
    m_server->listen_after_bind();
}

void Service::stop() {
    if (m_server) m_server->stop();
    if (m_thread.joinable()) m_thread.join();
}

}  // namespace regioncomp
