// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "regioncomp/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "regioncomp/error.hpp"

namespace regioncomp {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxCanvas = 4096;

struct Located {
    Token token;
    SourcePosition position;
};

// Validates one prompt clause. `base` is the fundamental list when checking a
// detail clause. Returns an empty string on success and stores the offending
// token index in `bad_index`.
std::string check_base(const std::vector<Token>& tokens, std::size_t& bad_index) {
    std::optional<Word> color;
    std::optional<Word> pattern;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token t = tokens[i];
        bad_index = i;
        switch (t.kind()) {
            case TokenKind::kColor:
                if (color == t.word) return "duplicate color '" + std::string(t.lexeme()) + "' in base clause";
                if (color) return "base clause must name exactly one color";
                color = t.word;
                break;
            case TokenKind::kPattern:
                if (pattern) return "base clause must name exactly one pattern";
                pattern = t.word;
                break;
            case TokenKind::kModifier:
                return "modifier '" + std::string(t.lexeme()) + "' belongs in the detail clause";
            case TokenKind::kLocation:
                return "location tokens are not allowed in region prompts";
            case TokenKind::kNull:
                return "the null token is not allowed in region prompts";
        }
    }
    bad_index = tokens.size();
    if (!color) return "base clause is missing a color";
    if (!pattern) return "base clause is missing a pattern";
    return {};
}

std::string check_detail(const std::vector<Token>& detail, const std::vector<Token>& base, std::size_t& bad_index) {
    std::vector<Token> kept;
    for (std::size_t i = 0; i < detail.size(); ++i) {
        const Token t = detail[i];
        bad_index = i;
        if (t.kind() == TokenKind::kLocation) return "location tokens are not allowed in region prompts";
        if (t.kind() == TokenKind::kNull) return "the null token is not allowed in region prompts";
        if (t.kind() == TokenKind::kColor || t.kind() == TokenKind::kPattern) kept.push_back(t);
    }
    bad_index = detail.size();
    std::vector<Token> a = kept;
    std::vector<Token> b = base;
    std::ranges::sort(a);
    std::ranges::sort(b);
    if (a != b) return "detail clause must repeat the base color and pattern exactly";
    return {};
}

void require_valid_rect(const RegionRect& rect, const std::string& path) {
    if (auto why = rect_violation(rect); !why.empty()) throw ValidationError(why, path);
}

void validate_region(const RegionSpec& region, const std::string& path) {
    require_valid_rect(region.rect, path + ".rect");
    require_valid_rect(region.refine_rect, path + ".refine_rect");
    std::size_t bad = 0;
    if (auto why = check_base(region.fundamental, bad); !why.empty()) throw ValidationError(why, path + ".base");
    if (auto why = check_detail(region.descriptive, region.fundamental, bad); !why.empty()) {
        throw ValidationError(why, path + ".detail");
    }
}

Word single_of_kind(const std::vector<Token>& tokens, TokenKind kind) {
    for (const Token& t : tokens) {
        if (t.kind() == kind) return t.word;
    }
    throw ValidationError("region prompt lacks a required token kind");
}

// ---- DSL lexer -------------------------------------------------------------------

enum class LexKind { kIdent, kNumber, kSize, kString, kLBracket, kRBracket, kComma, kSemicolon, kEnd };

struct Lexeme {
    LexKind kind = LexKind::kEnd;
    std::string text;
    SourcePosition position;
    // For strings: position of the first character inside the quotes.
    SourcePosition inner;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : m_src(src) {}

    Lexeme next() {
        skip_space();
        Lexeme lx;
        lx.position = {m_line, m_col};
        if (m_pos >= m_src.size()) return lx;
        const char c = m_src[m_pos];
        if (c == '[') return single(LexKind::kLBracket);
        if (c == ']') return single(LexKind::kRBracket);
        if (c == ',') return single(LexKind::kComma);
        if (c == ';') return single(LexKind::kSemicolon);
        if (c == '"') {
            advance();
            lx.kind = LexKind::kString;
            lx.inner = {m_line, m_col};
            while (m_pos < m_src.size() && m_src[m_pos] != '"') {
                if (m_src[m_pos] == '\n') throw ParseError("unterminated string", lx.position);
                lx.text.push_back(m_src[m_pos]);
                advance();
            }
            if (m_pos >= m_src.size()) throw ParseError("unterminated string", lx.position);
            advance();
            return lx;
        }
        if (is_alpha(c)) {
            lx.kind = LexKind::kIdent;
            while (m_pos < m_src.size() && (is_alpha(m_src[m_pos]) || is_digit(m_src[m_pos]))) {
                lx.text.push_back(m_src[m_pos]);
                advance();
            }
            return lx;
        }
        if (is_digit(c) || c == '.' || c == '-' || c == '+') {
            lx.kind = LexKind::kNumber;
            lx.text.push_back(c);
            advance();
            while (m_pos < m_src.size() && is_digit(m_src[m_pos])) {
                lx.text.push_back(m_src[m_pos]);
                advance();
            }
            if (is_digit(c) && std::ranges::all_of(lx.text, is_digit) && m_pos + 1 < m_src.size() &&
                (m_src[m_pos] == 'x' || m_src[m_pos] == 'X') && is_digit(m_src[m_pos + 1])) {
                lx.kind = LexKind::kSize;
                lx.text.push_back('x');
                advance();
                while (m_pos < m_src.size() && is_digit(m_src[m_pos])) {
                    lx.text.push_back(m_src[m_pos]);
                    advance();
                }
                return lx;
            }
            while (m_pos < m_src.size()) {
                const char d = m_src[m_pos];
                const bool sign_after_exponent =
                    (d == '-' || d == '+') && (lx.text.back() == 'e' || lx.text.back() == 'E');
                if (!(is_digit(d) || d == '.' || d == 'e' || d == 'E' || sign_after_exponent)) break;
                lx.text.push_back(d);
                advance();
            }
            return lx;
        }
        throw ParseError("unexpected character '" + printable(c) + "'", lx.position);
    }

private:
    static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    static std::string printable(char c) {
        const auto u = static_cast<unsigned char>(c);
        if (u >= 0x20 && u < 0x7F) return std::string(1, c);
        static constexpr char kHex[] = "0123456789abcdef";
        return std::string("\\x") + kHex[u >> 4] + kHex[u & 0xF];
    }

    Lexeme single(LexKind kind) {
        Lexeme lx;
        lx.kind = kind;
        lx.position = {m_line, m_col};
        lx.text.push_back(m_src[m_pos]);
        advance();
        return lx;
    }

    void advance() {
        if (m_src[m_pos] == '\n') {
            ++m_line;
            m_col = 1;
        } else if ((static_cast<unsigned char>(m_src[m_pos]) & 0xC0) != 0x80) {
            ++m_col;  // columns count code points
        }
        ++m_pos;
    }

    void skip_space() {
        while (m_pos < m_src.size()) {
            const char c = m_src[m_pos];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (m_pos < m_src.size() && m_src[m_pos] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view m_src;
    std::size_t m_pos = 0;
    std::size_t m_line = 1;
    std::size_t m_col = 1;
};

// Splits a prompt string into located tokens; columns point inside the source.
std::vector<Located> lex_prompt(const Lexeme& str) {
    std::vector<Located> out;
    std::size_t i = 0;
    std::size_t col = str.inner.column;
    const std::string& s = str.text;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
            ++col;
        }
        if (i >= s.size()) break;
        const std::size_t start = i;
        const std::size_t start_col = col;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') {
            if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) ++col;
            ++i;
        }
        const std::string_view word(s.data() + start, i - start);
        const SourcePosition pos{str.inner.line, start_col};
        auto token = lookup_token(word);
        if (!token) throw ParseError("unknown token '" + std::string(word) + "'", pos);
        out.push_back({*token, pos});
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : m_lexer(text) { m_cur = m_lexer.next(); }

    SceneSpec parse() {
        SceneSpec scene;
        bool have_canvas = false;
        bool have_hints = false;
        std::vector<SourcePosition> region_positions;
        while (m_cur.kind != LexKind::kEnd) {
            if (m_cur.kind == LexKind::kSemicolon) {
                take();
                continue;
            }
            const Lexeme head = expect(LexKind::kIdent, "expected 'scene', 'hints', 'global' or 'region'");
            if (head.text == "scene") {
                if (have_canvas) throw ParseError("duplicate scene header", head.position);
                parse_canvas(scene);
                have_canvas = true;
            } else if (head.text == "hints") {
                if (have_hints) throw ParseError("duplicate hints statement", head.position);
                const Lexeme v = expect(LexKind::kIdent, "expected 'on' or 'off'");
                if (v.text == "on") {
                    scene.location_hints = true;
                } else if (v.text == "off") {
                    scene.location_hints = false;
                } else {
                    throw ParseError("expected 'on' or 'off'", v.position);
                }
                have_hints = true;
            } else if (head.text == "global") {
                if (scene.global_override) throw ParseError("duplicate global statement", head.position);
                const Lexeme s = expect(LexKind::kString, "expected a quoted token list");
                for (const auto& lt : lex_prompt(s)) scene.global_tokens.push_back(lt.token);
                if (scene.global_tokens.empty()) throw ParseError("global prompt is empty", s.inner);
                scene.global_override = true;
            } else if (head.text == "region") {
                if (!have_canvas) throw ParseError("region before the scene header", head.position);
                scene.regions.push_back(parse_region(head.position));
                region_positions.push_back(head.position);
            } else {
                throw ParseError("unknown statement '" + head.text + "'", head.position);
            }
            if (m_cur.kind != LexKind::kEnd && m_cur.kind != LexKind::kSemicolon) {
                throw ParseError("expected ';'", m_cur.position);
            }
        }
        if (!have_canvas) throw ParseError("missing scene header", m_cur.position);
        if (scene.regions.empty()) throw ParseError("scene has no regions", m_cur.position);
        try {
            finalize_scene(scene);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), m_cur.position);
        }
        return scene;
    }

private:
    Lexeme take() {
        Lexeme out = std::move(m_cur);
        m_cur = m_lexer.next();
        return out;
    }

    Lexeme expect(LexKind kind, const char* message) {
        if (m_cur.kind != kind) throw ParseError(message, m_cur.position);
        return take();
    }

    void parse_canvas(SceneSpec& scene) {
        const Lexeme size = expect(LexKind::kSize, "expected canvas size like 64x64");
        const auto x = size.text.find('x');
        std::size_t h = 0;
        std::size_t w = 0;
        const char* begin = size.text.data();
        auto r1 = std::from_chars(begin, begin + x, h);
        auto r2 = std::from_chars(begin + x + 1, begin + size.text.size(), w);
        if (r1.ec != std::errc{} || r2.ec != std::errc{} || r2.ptr != begin + size.text.size() || h == 0 ||
            w == 0 || h > kMaxCanvas || w > kMaxCanvas) {
            throw ParseError("canvas size must be between 1x1 and 4096x4096", size.position);
        }
        scene.canvas_height = h;
        scene.canvas_width = w;
    }

    double parse_number() {
        const Lexeme n = expect(LexKind::kNumber, "expected a number");
        double v = 0.0;
        const char* begin = n.text.data();
        const char* end = begin + n.text.size();
        const char* start = (*begin == '+') ? begin + 1 : begin;
        auto res = std::from_chars(start, end, v);
        if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
            throw ParseError("malformed number '" + n.text + "'", n.position);
        }
        return v;
    }

    RegionRect parse_rect(SourcePosition& where) {
        where = expect(LexKind::kLBracket, "expected '['").position;
        RegionRect r;
        r.y_offset = parse_number();
        expect(LexKind::kComma, "expected ','");
        r.y_scale = parse_number();
        expect(LexKind::kComma, "expected ','");
        r.x_offset = parse_number();
        expect(LexKind::kComma, "expected ','");
        r.x_scale = parse_number();
        expect(LexKind::kRBracket, "expected ']'");
        if (auto why = rect_violation(r); !why.empty()) throw ParseError(why, where);
        return r;
    }

    RegionSpec parse_region(SourcePosition region_pos) {
        RegionSpec region;
        SourcePosition rect_pos;
        region.rect = parse_rect(rect_pos);
        std::optional<Lexeme> base;
        std::optional<Lexeme> detail;
        std::optional<RegionRect> refine;
        while (m_cur.kind == LexKind::kIdent) {
            const Lexeme clause = take();
            if (clause.text == "base" || clause.text == "detail") {
                auto& slot = clause.text == "base" ? base : detail;
                if (slot) throw ParseError("duplicate " + clause.text + " clause", clause.position);
                slot = expect(LexKind::kString, "expected a quoted token list");
            } else if (clause.text == "refine") {
                if (refine) throw ParseError("duplicate refine clause", clause.position);
                SourcePosition p;
                refine = parse_rect(p);
            } else if (clause.text == "synthetic") {
                region.synthetic = true;
            } else {
                throw ParseError("unknown region clause '" + clause.text + "'", clause.position);
            }
        }
        if (!base) throw ParseError("missing base clause", region_pos);

        const auto base_tokens = lex_prompt(*base);
        for (const auto& lt : base_tokens) region.fundamental.push_back(lt.token);
        std::size_t bad = 0;
        if (auto why = check_base(region.fundamental, bad); !why.empty()) {
            throw ParseError(why, bad < base_tokens.size() ? base_tokens[bad].position : base->inner);
        }
        if (detail) {
            const auto detail_tokens = lex_prompt(*detail);
            for (const auto& lt : detail_tokens) region.descriptive.push_back(lt.token);
            if (auto why = check_detail(region.descriptive, region.fundamental, bad); !why.empty()) {
                throw ParseError(why, bad < detail_tokens.size() ? detail_tokens[bad].position : detail->inner);
            }
        } else {
            region.descriptive = region.fundamental;
        }
        region.refine_rect = refine.value_or(region.rect);
        return region;
    }

    Lexer m_lexer;
    Lexeme m_cur;
};

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string rect_dsl(const RegionRect& r) {
    return "[" + format_double(r.y_offset) + "," + format_double(r.y_scale) + "," + format_double(r.x_offset) +
           "," + format_double(r.x_scale) + "]";
}

const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ValidationError("expected an object", path);
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(std::string("missing field '") + key + "'", path);
    return *it;
}

double number_field(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_number()) throw ValidationError("expected a number", path + "." + key);
    return v.get<double>();
}

}  // namespace

json rect_json(const RegionRect& r) {
    return json{{"y_offset", r.y_offset}, {"y_scale", r.y_scale}, {"x_offset", r.x_offset}, {"x_scale", r.x_scale}};
}

RegionRect rect_from_json(const json& v, const std::string& path) {
    RegionRect r;
    r.y_offset = number_field(v, "y_offset", path);
    r.y_scale = number_field(v, "y_scale", path);
    r.x_offset = number_field(v, "x_offset", path);
    r.x_scale = number_field(v, "x_scale", path);
    require_valid_rect(r, path);
    return r;
}

std::vector<Token> tokens_from_json(const json& v, const std::string& path) {
    std::vector<Token> out;
    if (v.is_string()) {
        try {
            return parse_token_list(v.get<std::string>());
        } catch (const ValidationError& e) {
            throw ValidationError(e.what(), path);
        }
    }
    if (!v.is_array()) throw ValidationError("expected a token array or string", path);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!v[i].is_string()) throw ValidationError("expected a token string", p);
        auto t = lookup_token(v[i].get<std::string>());
        if (!t) throw ValidationError("unknown token '" + v[i].get<std::string>() + "'", p);
        out.push_back(*t);
    }
    return out;
}


Word RegionSpec::color() const { return single_of_kind(fundamental, TokenKind::kColor); }

Word RegionSpec::pattern() const { return single_of_kind(fundamental, TokenKind::kPattern); }

std::vector<Word> RegionSpec::modifiers() const {
    std::vector<Word> out;
    for (const Token& t : descriptive) {
        if (t.kind() == TokenKind::kModifier) out.push_back(t.word);
    }
    return out;
}

std::optional<Word> location_hint(const RegionRect& rect) {
    const double dx = rect.x_offset + 0.5 * rect.x_scale - 0.5;
    const double dy = rect.y_offset + 0.5 * rect.y_scale - 0.5;
    if (std::hypot(dx, dy) <= 0.05) return std::nullopt;
    if (std::abs(dx) >= std::abs(dy)) return dx < 0.0 ? Word::kLeft : Word::kRight;
    return dy < 0.0 ? Word::kTop : Word::kBottom;
}

std::vector<Token> derive_global_prompt(const SceneSpec& scene) {
    std::vector<Token> out;
    for (const RegionSpec& region : scene.regions) {
        out.insert(out.end(), region.fundamental.begin(), region.fundamental.end());
        if (scene.location_hints) {
            if (auto hint = location_hint(region.rect)) out.push_back(Token{*hint});
        }
    }
    return out;
}

std::vector<std::size_t> paste_order(const SceneSpec& scene) {
    std::vector<std::size_t> order;
    order.reserve(scene.regions.size());
    for (std::size_t i = 0; i < scene.regions.size(); ++i) {
        if (scene.regions[i].synthetic) order.push_back(i);
    }
    for (std::size_t i = 0; i < scene.regions.size(); ++i) {
        if (!scene.regions[i].synthetic) order.push_back(i);
    }
    return order;
}

void finalize_scene(SceneSpec& scene) {
    if (scene.canvas_height == 0 || scene.canvas_width == 0 || scene.canvas_height > kMaxCanvas ||
        scene.canvas_width > kMaxCanvas) {
        throw ValidationError("canvas size must be between 1x1 and 4096x4096", "canvas");
    }
    if (scene.regions.empty()) throw ValidationError("scene has no regions", "regions");
    for (std::size_t i = 0; i < scene.regions.size(); ++i) {
        validate_region(scene.regions[i], "regions[" + std::to_string(i) + "]");
    }

    const std::size_t h = scene.canvas_height;
    const std::size_t w = scene.canvas_width;
    Mask covered(h, w);
    for (const RegionSpec& region : scene.regions) {
        const PixelRect px = rect_to_pixels(region.rect, h, w);
        for (std::size_t r = px.row_start; r < px.row_end; ++r) {
            for (std::size_t c = px.col_start; c < px.col_end; ++c) covered.set(r, c, true);
        }
    }
    if (covered.count() < h * w) {
        PixelRect box{h, 0, w, 0};
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t c = 0; c < w; ++c) {
                if (covered.get(r, c)) continue;
                box.row_start = std::min(box.row_start, r);
                box.row_end = std::max(box.row_end, r + 1);
                box.col_start = std::min(box.col_start, c);
                box.col_end = std::max(box.col_end, c + 1);
            }
        }
        RegionSpec background = make_region(
            RegionRect{static_cast<double>(box.row_start) / static_cast<double>(h),
                       static_cast<double>(box.rows()) / static_cast<double>(h),
                       static_cast<double>(box.col_start) / static_cast<double>(w),
                       static_cast<double>(box.cols()) / static_cast<double>(w)},
            "white solid");
        background.synthetic = true;
        scene.regions.push_back(std::move(background));
    }

    if (scene.global_override) {
        if (scene.global_tokens.empty()) throw ValidationError("global prompt override is empty", "global_tokens");
    } else {
        scene.global_tokens = derive_global_prompt(scene);
    }
}

std::vector<Token> parse_token_list(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
        if (start == i) break;
        const auto word = text.substr(start, i - start);
        auto token = lookup_token(word);
        if (!token) throw ValidationError("unknown token '" + std::string(word) + "'");
        out.push_back(*token);
    }
    return out;
}

RegionSpec make_region(const RegionRect& rect, std::string_view base, std::string_view detail) {
    RegionSpec region;
    region.rect = rect;
    region.refine_rect = rect;
    region.fundamental = parse_token_list(base);
    region.descriptive = detail.empty() ? region.fundamental : parse_token_list(detail);
    validate_region(region, "region");
    return region;
}

SceneSpec parse_scene(std::string_view text) {
    if (text.empty()) throw ParseError("scene text is empty", SourcePosition{});
    return Parser(text).parse();
}

std::string scene_to_dsl(const SceneSpec& scene) {
    std::string out = "scene " + std::to_string(scene.canvas_height) + "x" + std::to_string(scene.canvas_width) + ";\n";
    out += std::string("hints ") + (scene.location_hints ? "on" : "off") + ";\n";
    if (scene.global_override) out += "global \"" + join_tokens(scene.global_tokens) + "\";\n";
    for (const RegionSpec& region : scene.regions) {
        out += "region " + rect_dsl(region.rect) + " base \"" + join_tokens(region.fundamental) + "\" detail \"" +
               join_tokens(region.descriptive) + "\"";
        if (region.refine_rect != region.rect) out += " refine " + rect_dsl(region.refine_rect);
        if (region.synthetic) out += " synthetic";
        out += ";\n";
    }
    return out;
}

json scene_to_json(const SceneSpec& scene) {
    json regions = json::array();
    for (const RegionSpec& region : scene.regions) {
        regions.push_back(json{{"rect", rect_json(region.rect)},
                               {"base", token_strings(region.fundamental)},
                               {"detail", token_strings(region.descriptive)},
                               {"refine_rect", rect_json(region.refine_rect)},
                               {"synthetic", region.synthetic}});
    }
    return json{{"canvas", {{"height", scene.canvas_height}, {"width", scene.canvas_width}}},
                {"location_hints", scene.location_hints},
                {"regions", std::move(regions)},
                {"global_tokens", token_strings(scene.global_tokens)},
                {"global_override", scene.global_override}};
}

SceneSpec scene_from_json(const json& doc) {
    SceneSpec scene;
    const json& canvas = field(doc, "canvas", "");
    const auto dim = [&](const char* key) {
        const json& v = field(canvas, key, "canvas");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() > 0)) {
            throw ValidationError("expected a positive integer", std::string("canvas.") + key);
        }
        return v.get<std::size_t>();
    };
    scene.canvas_height = dim("height");
    scene.canvas_width = dim("width");
    if (doc.contains("location_hints")) {
        if (!doc["location_hints"].is_boolean()) throw ValidationError("expected a boolean", "location_hints");
        scene.location_hints = doc["location_hints"].get<bool>();
    }
    const json& regions = field(doc, "regions", "");
    if (!regions.is_array()) throw ValidationError("expected an array", "regions");
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const std::string path = "regions[" + std::to_string(i) + "]";
        const json& r = regions[i];
        RegionSpec region;
        region.rect = rect_from_json(field(r, "rect", path), path + ".rect");
        region.fundamental = tokens_from_json(field(r, "base", path), path + ".base");
        region.descriptive =
            r.contains("detail") ? tokens_from_json(r["detail"], path + ".detail") : region.fundamental;
        region.refine_rect =
            r.contains("refine_rect") ? rect_from_json(r["refine_rect"], path + ".refine_rect") : region.rect;
        if (r.contains("synthetic")) {
            if (!r["synthetic"].is_boolean()) throw ValidationError("expected a boolean", path + ".synthetic");
            region.synthetic = r["synthetic"].get<bool>();
        }
        scene.regions.push_back(std::move(region));
    }
    if (doc.contains("global_override")) {
        if (!doc["global_override"].is_boolean()) throw ValidationError("expected a boolean", "global_override");
        scene.global_override = doc["global_override"].get<bool>();
    }
    if (scene.global_override) scene.global_tokens = tokens_from_json(field(doc, "global_tokens", ""), "global_tokens");
    finalize_scene(scene);
    return scene;
}

std::string serialize_scene(const SceneSpec& scene) { return scene_to_json(scene).dump(2); }

SceneSpec parse_scene_document(std::string_view json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) throw ValidationError("scene document is not valid JSON");
    return scene_from_json(doc);
}

}  // namespace regioncomp
