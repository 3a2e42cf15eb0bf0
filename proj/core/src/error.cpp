#include "chl/error.hpp"

namespace chl {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::schema: return "SchemaError";
    case ErrorKind::dimension: return "DimensionError";
    case ErrorKind::argument: return "ArgumentError";
    case ErrorKind::format: return "FormatError";
    case ErrorKind::length: return "LengthError";
    case ErrorKind::parse: return "ParseError";
    case ErrorKind::version: return "VersionError";
    case ErrorKind::domain: return "DomainError";
    case ErrorKind::rank: return "RankError";
    case ErrorKind::state: return "StateError";
    case ErrorKind::io: return "IoError";
  }
  return "Error";
}

}  // namespace chl
