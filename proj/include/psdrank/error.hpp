#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace psdrank {

enum class ErrorCode {
  NonTriangularLength,
  NoConvergence,
  OnesNotInSpan,
  NotNested,
  DomainError,
  OriginNotInterior,
  RankMismatch,
  ZeroMatrix,
  NotConvex,
  CollinearVertices,
  WrongVertexCount,
  DegenerateParameters,
  DimensionMismatch,
  VertexNotInLift,
  NoDualWitness,
  RowCountMismatch,
  NonpositiveScalar,
  SearchFailed,
  NotStrictlyElliptic,
  UnverifiedCertificate,
  InvalidInput,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonTriangularLength: return "NonTriangularLength";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OnesNotInSpan: return "OnesNotInSpan";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::OriginNotInterior: return "OriginNotInterior";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::CollinearVertices: return "CollinearVertices";
    case ErrorCode::WrongVertexCount: return "WrongVertexCount";
    case ErrorCode::DegenerateParameters: return "DegenerateParameters";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::VertexNotInLift: return "VertexNotInLift";
    case ErrorCode::NoDualWitness: return "NoDualWitness";
    case ErrorCode::RowCountMismatch: return "RowCountMismatch";
    case ErrorCode::NonpositiveScalar: return "NonpositiveScalar";
    case ErrorCode::SearchFailed: return "SearchFailed";
    case ErrorCode::NotStrictlyElliptic: return "NotStrictlyElliptic";
    case ErrorCode::UnverifiedCertificate: return "UnverifiedCertificate";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

// Every failure raised by the library. `index` names the offending row,
// column, vertex, facet or chunk when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace psdrank
