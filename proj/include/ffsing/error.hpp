// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffsing {

// Base of every error raised by the library. User/input problems derive from
// Error directly; numeric failures derive from NumericError so front ends can
// map them to a distinct exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidProbability : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownPhoneme : public Error {
 public:
  using Error::Error;
};

class InvalidStep : public Error {
 public:
  using Error::Error;
};

class MissingVariant : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonFiniteGradient : public NumericError {
 public:
  using NumericError::NumericError;
};

// Parse failure located at a 1-based line of the input text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

// Semantic failure; names every offending note (0-based) and, when raised by
// a parser, the line of the first problem.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::size_t> notes = {},
                  std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what),
        notes_(std::move(notes)),
        line_(line) {}

  const std::vector<std::size_t>& notes() const noexcept { return notes_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::vector<std::size_t> notes_;
  std::optional<std::size_t> line_;
};

class InsufficientFrames : public Error {
 public:
  InsufficientFrames(const std::string& what,
                     std::optional<std::size_t> note = std::nullopt)
      : Error(what), note_(note) {}

  std::optional<std::size_t> note() const noexcept { return note_; }

 private:
  std::optional<std::size_t> note_;
};

}  // namespace ffsing
