// Copyright (C) 2026 The regioncomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace regioncomp {

/// 1-based line/column into a scene source text.
struct SourcePosition {
    std::size_t line = 1;
    std::size_t column = 1;

    bool operator==(const SourcePosition&) const = default;
};

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), m_code(std::move(code)) {}

    const std::string& code() const noexcept { return m_code; }

private:
    std::string m_code;
};

/// Grid/rect dimensions do not line up.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("shape_error", message) {}
};

/// A value is outside its documented domain.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message, std::string path = {})
        : Error("validation_error", message), m_path(std::move(path)) {}

    /// Location inside a structured document (e.g. "regions[1].rect"), empty when not applicable.
    const std::string& path() const noexcept { return m_path; }

private:
    std::string m_path;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, SourcePosition position)
        : Error("parse_error", message + " at line " + std::to_string(position.line) + ", column " +
                                   std::to_string(position.column)),
          m_detail(message),
          m_position(position) {}

    const std::string& detail() const noexcept { return m_detail; }
    const SourcePosition& position() const noexcept { return m_position; }

private:
    std::string m_detail;
    SourcePosition m_position;
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& message) : Error("not_found", message) {}
};

/// The bounded run queue is full.
class BusyError : public Error {
public:
    explicit BusyError(const std::string& message) : Error("queue_full", message) {}
};

class StorageError : public Error {
public:
    explicit StorageError(const std::string& message) : Error("storage_error", message) {}
};

}  // namespace regioncomp
