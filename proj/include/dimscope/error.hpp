#pragma once

#include <stdexcept>
#include <string>

namespace dimscope {

enum class ErrorCode {
  Io,
  Parse,
  Schema,
  DegenerateDim,
  FingerprintMismatch,
  Format,
  DegenerateLayout,
  CliqueExplosion,
  NoCategoricalDim,
  InvalidK,
  Validation,
  RevisionConflict,
  Cancelled,
  InvalidArgument,
};

const char* nameOf(ErrorCode code) noexcept;

// All library failures derive from Error; the C API maps code() onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& what)
      : Error(ErrorCode::Parse, "row " + std::to_string(row) + ", column " +
                                    std::to_string(column) + ": " + what),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

// Rejected session mutation; field() names the offending parameter.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(ErrorCode::Validation, field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace dimscope
