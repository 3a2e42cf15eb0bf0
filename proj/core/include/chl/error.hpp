#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chl {

enum class ErrorKind {
  schema,
  dimension,
  argument,
  format,
  length,
  parse,
  version,
  domain,
  rank,
  state,
  io,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

/// Base of every error thrown by the library. The kind identifies the
/// failure class; the CLI reports it by name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class KindError : public Error {
 public:
  explicit KindError(const std::string& message) : Error(K, message) {}
};

using SchemaError = KindError<ErrorKind::schema>;
using DimensionError = KindError<ErrorKind::dimension>;
using ArgumentError = KindError<ErrorKind::argument>;
using FormatError = KindError<ErrorKind::format>;
using LengthError = KindError<ErrorKind::length>;
using ParseError = KindError<ErrorKind::parse>;
using VersionError = KindError<ErrorKind::version>;
using DomainError = KindError<ErrorKind::domain>;
using RankError = KindError<ErrorKind::rank>;
using StateError = KindError<ErrorKind::state>;
using IoError = KindError<ErrorKind::io>;

}  // namespace chl
