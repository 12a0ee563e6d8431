#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace contextdb {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  DimensionMismatchError(std::size_t expected, std::size_t actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// A filter clause compared a stored value against a literal of another type,
/// or applied an ordering operator to a non-number.
class FilterTypeError : public Error {
 public:
  FilterTypeError(std::string field, std::string stored_type, std::string literal_type)
      : Error("filter type mismatch on field '" + field + "': stored " + stored_type +
              ", literal " + literal_type),
        field_(std::move(field)),
        stored_type_(std::move(stored_type)),
        literal_type_(std::move(literal_type)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& stored_type() const noexcept { return stored_type_; }
  const std::string& literal_type() const noexcept { return literal_type_; }

 private:
  std::string field_;
  std::string stored_type_;
  std::string literal_type_;
};

class FilterParseError : public Error {
 public:
  /// `column` is 1-based.
  FilterParseError(std::size_t column, const std::string& what)
      : Error("filter parse error at column " + std::to_string(column) + ": " + what),
        column_(column) {}

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class EmbeddingError : public Error {
 public:
  using Error::Error;
};

/// Search or insert against an index that is empty or not yet trained.
class IndexStateError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  TrainingError(std::size_t required, std::size_t provided)
      : Error("training requires at least " + std::to_string(required) + " vectors, got " +
              std::to_string(provided)),
        required_(required),
        provided_(provided) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t provided() const noexcept { return provided_; }

 private:
  std::size_t required_;
  std::size_t provided_;
};

class SnapshotError : public Error {
 public:
  using Error::Error;
};

class SnapshotVersionError : public SnapshotError {
 public:
  SnapshotVersionError(std::uint32_t found, std::uint32_t supported)
      : SnapshotError("unsupported snapshot format version " + std::to_string(found) +
                      " (this build reads version " + std::to_string(supported) + ")"),
        found_(found),
        supported_(supported) {}

  std::uint32_t found() const noexcept { return found_; }
  std::uint32_t supported() const noexcept { return supported_; }

 private:
  std::uint32_t found_;
  std::uint32_t supported_;
};

class SnapshotCorruptError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class LlmError : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure inside one pipeline stage; `stage()` names it.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& cause)
      : Error("pipeline stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace contextdb
