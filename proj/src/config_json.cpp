// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/config_json.hpp"

#include <charconv>
#include <set>

#include "regioncomp/error.hpp"

namespace regioncomp {

using nlohmann::json;

namespace {

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& prefix) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known.count(it.key())) throw ValidationError("unknown field '" + it.key() + "'", prefix + it.key());
    }
}

std::uint64_t u64(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    if (v.is_string()) {
        // Seeds above 2^53 survive JavaScript clients as strings.
        const std::string s = v.get<std::string>();
        std::uint64_t out = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), out);
        if (res.ec == std::errc{} && res.ptr == s.data() + s.size() && !s.empty()) return out;
    }
    throw ValidationError("expected a non-negative integer", path);
}

double real(const json& v, const std::string& path) {
    if (!v.is_number()) throw ValidationError("expected a number", path);
    return v.get<double>();
}

bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ValidationError("expected a boolean", path);
    return v.get<bool>();
}

}  // namespace

json config_to_json(const SamplerConfig& c) {
    return json{{"strategy", std::string(to_string(c.strategy))},
                {"steps", c.steps},
                {"bind_steps", c.bind_steps},
                {"delta", c.delta},
                {"guidance", c.guidance},
                {"seed", c.seed},
                {"content_queries", c.content_queries},
                {"threads", c.threads},
                {"conditioner",
                 {{"dim", c.conditioner.dim},
                  {"sharpness", c.conditioner.sharpness},
                  {"seed", c.conditioner.seed},
                  {"content_gain", c.conditioner.content_gain}}}};
}

SamplerConfig config_from_json(const json& doc, const SamplerConfig& defaults) {
    if (doc.is_null()) return defaults;
    if (!doc.is_object()) throw ValidationError("expected an object", "config");
    reject_unknown(doc,
                   {"strategy", "steps", "bind_steps", "delta", "guidance", "seed", "content_queries", "threads",
                    "conditioner"},
                   "config.");
    SamplerConfig c = defaults;
    if (doc.contains("strategy")) {
        const json& v = doc["strategy"];
        if (!v.is_string()) throw ValidationError("expected a strategy name", "config.strategy");
        auto s = parse_strategy(v.get<std::string>());
        if (!s) throw ValidationError("unknown strategy '" + v.get<std::string>() + "'", "config.strategy");
        c.strategy = *s;
    }
    if (doc.contains("steps")) c.steps = u64(doc["steps"], "config.steps");
    if (doc.contains("bind_steps")) c.bind_steps = u64(doc["bind_steps"], "config.bind_steps");
    if (doc.contains("delta")) c.delta = real(doc["delta"], "config.delta");
    if (doc.contains("guidance")) c.guidance = real(doc["guidance"], "config.guidance");
    if (doc.contains("seed")) c.seed = u64(doc["seed"], "config.seed");
    if (doc.contains("content_queries")) c.content_queries = boolean(doc["content_queries"], "config.content_queries");
    if (doc.contains("threads")) {
        const std::uint64_t t = u64(doc["threads"], "config.threads");
        if (t == 0 || t > 256) throw ValidationError("threads must be 1..256", "config.threads");
        c.threads = static_cast<unsigned>(t);
    }
    if (doc.contains("conditioner")) {
        const json& cd = doc["conditioner"];
        if (!cd.is_object()) throw ValidationError("expected an object", "config.conditioner");
        reject_unknown(cd, {"dim", "sharpness", "seed", "content_gain"}, "config.conditioner.");
        if (cd.contains("dim")) c.conditioner.dim = u64(cd["dim"], "config.conditioner.dim");
        if (cd.contains("sharpness")) {
            c.conditioner.sharpness = static_cast<float>(real(cd["sharpness"], "config.conditioner.sharpness"));
        }
        if (cd.contains("seed")) c.conditioner.seed = u64(cd["seed"], "config.conditioner.seed");
        if (cd.contains("content_gain")) {
            c.conditioner.content_gain =
                static_cast<float>(real(cd["content_gain"], "config.conditioner.content_gain"));
        }
    }
    try {
        c.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(e.what(), "config." + e.path());
    }
    return c;
}

json mask_to_json(const Mask& mask) {
    json rows = json::array();
    for (std::size_t r = 0; r < mask.height(); ++r) {
        std::string row(mask.width(), '0');
        for (std::size_t c = 0; c < mask.width(); ++c) {
            if (mask.get(r, c)) row[c] = '1';
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Mask mask_from_json(const json& doc, std::size_t height, std::size_t width, const std::string& path) {
    if (!doc.is_array() || doc.size() != height) {
        throw ValidationError("mask must be an array of " + std::to_string(height) + " row strings", path);
    }
    Mask mask(height, width);
    for (std::size_t r = 0; r < height; ++r) {
        const std::string p = path + "[" + std::to_string(r) + "]";
        if (!doc[r].is_string()) throw ValidationError("expected a row string", p);
        const std::string row = doc[r].get<std::string>();
        if (row.size() != width) throw ValidationError("mask row must have " + std::to_string(width) + " cells", p);
        for (std::size_t c = 0; c < width; ++c) {
            if (row[c] != '0' && row[c] != '1') throw ValidationError("mask cells must be '0' or '1'", p);
            mask.set(r, c, row[c] == '1');
        }
    }
    return mask;
}

RepaintRequest repaint_request_from_json(const json& doc, std::size_t height, std::size_t width) {
    if (!doc.is_object()) throw ValidationError("expected an object", "repaint");
    reject_unknown(doc, {"region", "mask_rect", "mask", "base", "detail", "nonce"}, "");
    RepaintRequest req;
    if (doc.contains("region") && !doc["region"].is_null()) req.region = u64(doc["region"], "region");
    if (doc.contains("mask_rect") && !doc["mask_rect"].is_null()) {
        req.mask_rect = rect_from_json(doc["mask_rect"], "mask_rect");
    }
    if (doc.contains("mask") && !doc["mask"].is_null()) req.mask = mask_from_json(doc["mask"], height, width, "mask");
    if (doc.contains("base") && !doc["base"].is_null()) req.base = tokens_from_json(doc["base"], "base");
    if (doc.contains("detail") && !doc["detail"].is_null()) req.detail = tokens_from_json(doc["detail"], "detail");
    if (doc.contains("nonce") && !doc["nonce"].is_null()) req.nonce = u64(doc["nonce"], "nonce");
    return req;
}

json repaint_request_to_json(const RepaintRequest& req) {
    json doc = json::object();
    if (req.region) doc["region"] = *req.region;
    if (req.mask_rect) doc["mask_rect"] = rect_json(*req.mask_rect);
    if (req.mask) doc["mask"] = mask_to_json(*req.mask);
    if (req.base) doc["base"] = token_strings(*req.base);
    if (req.detail) doc["detail"] = token_strings(*req.detail);
    if (req.nonce) doc["nonce"] = *req.nonce;
    return doc;
}

json edit_to_json(const RepaintEdit& edit) {
    return json{{"scene", scene_to_json(edit.scene)}, {"mask", mask_to_json(edit.mask)}, {"nonce", edit.nonce}};
}

RepaintEdit edit_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("scene") || !doc.contains("mask")) {
        throw ValidationError("repaint edit needs scene and mask", "edit");
    }
    RepaintEdit edit;
    edit.scene = scene_from_json(doc["scene"]);
    edit.mask = mask_from_json(doc["mask"], edit.scene.canvas_height, edit.scene.canvas_width, "edit.mask");
    edit.nonce = doc.contains("nonce") ? u64(doc["nonce"], "edit.nonce") : 1;
    return edit;
}

}  // namespace regioncomp
