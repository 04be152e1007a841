// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace synergy {

enum class ErrorKind {
    // corpus
    MalformedRow,
    UnknownCode,
    DuplicateId,
    UnknownEnum,
    DuplicateGroup,
    UnknownGroup,
    MissingCode,
    Io,
    // coder
    EmptyMessage,
    Unparseable,
    TransportError,
    Credential,
    // evalkit
    LengthMismatch,
    EmptyInput,
    EmptyMatrix,
    BadK,
    // sdm
    EmptyPanel,
    InsufficientObservations,
    MissingWeight,
    // stats
    TooFewPairs,
    SampleTooSmall,
    SampleTooLarge,
    ZeroVariance,
    TooFewGroups,
    GroupTooSmall,
    TooFewObservations,
    ZeroWithinVariance,
    BothZeroVariance,
    EmptyGroup,
    InvalidArgument,
    // cli
    Config,
};

std::string_view to_string(ErrorKind kind);

/// Base of every error raised by the library. `kind()` is the stable,
/// machine-checkable part; `what()` carries a human readable message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class MalformedRow : public Error {
public:
    MalformedRow(std::size_t line, std::string reason)
        : Error(ErrorKind::MalformedRow, "line " + std::to_string(line) + ": " + reason),
          line_(line), reason_(std::move(reason)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

class UnknownCode : public Error {
public:
    explicit UnknownCode(std::string token)
        : Error(ErrorKind::UnknownCode, "'" + token + "'"), token_(std::move(token)) {}

    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

class UnknownEnum : public Error {
public:
    UnknownEnum(std::string field, std::string token)
        : Error(ErrorKind::UnknownEnum, field + "='" + token + "'"),
          field_(std::move(field)), token_(std::move(token)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& token() const noexcept { return token_; }

private:
    std::string field_;
    std::string token_;
};

class Unparseable : public Error {
public:
    explicit Unparseable(std::string response)
        : Error(ErrorKind::Unparseable, "no code token in response '" + response + "'"),
          response_(std::move(response)) {}

    const std::string& response() const noexcept { return response_; }

private:
    std::string response_;
};

class TransportError : public Error {
public:
    TransportError(std::string id, int attempts, const std::string& detail)
        : Error(ErrorKind::TransportError,
                id + " failed after " + std::to_string(attempts) + " attempt(s): " + detail),
          id_(std::move(id)), attempts_(attempts) {}

    const std::string& id() const noexcept { return id_; }
    int attempts() const noexcept { return attempts_; }

private:
    std::string id_;
    int attempts_;
};

} // namespace synergy
