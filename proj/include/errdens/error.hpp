#pragma once

#include <stdexcept>
#include <string>

namespace errdens {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  EmptyNeighborhood,
  AllTrimmed,
  NoTrimmedObservations,
  ZeroCurvature,
  MalformedCsv,
  EmptyFile,
  Io,
};

//! Single exception type for all library errors; `code()` is stable and
//! machine-mappable (CLI exit statuses and the C API rely on it).
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what)
    , code_(code)
  {
  }

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code)
{
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyNeighborhood: return "EmptyNeighborhood";
    case ErrorCode::AllTrimmed: return "AllTrimmed";
    case ErrorCode::NoTrimmedObservations: return "NoTrimmedObservations";
    case ErrorCode::ZeroCurvature: return "ZeroCurvature";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& what)
{
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what)
{
  if (!condition)
    throw Error(code, what);
}

} // namespace errdens
