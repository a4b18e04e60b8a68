#include "sanid/error.hpp"

namespace sanid {

const char* error_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kDimension: return "E_DIMENSION";
    case ErrorKind::kPrecondition: return "E_PRECONDITION";
    case ErrorKind::kNumeric: return "E_NUMERIC";
    case ErrorKind::kIndex: return "E_INDEX";
    case ErrorKind::kUsage: return "E_USAGE";
    case ErrorKind::kData: return "E_DATA";
    case ErrorKind::kIo: return "E_IO";
    case ErrorKind::kConfig: return "E_CONFIG";
    case ErrorKind::kCheckpoint: return "E_CHECKPOINT";
  }
  return "E_UNKNOWN";
}

// 1 is left for unexpected exceptions, 2 for command-line parse errors.
int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kConfig: return 3;
    case ErrorKind::kData: return 4;
    case ErrorKind::kIo: return 5;
    case ErrorKind::kCheckpoint: return 6;
    case ErrorKind::kNumeric: return 7;
    case ErrorKind::kIndex: return 8;
    case ErrorKind::kDimension: return 9;
    case ErrorKind::kPrecondition: return 10;
    case ErrorKind::kUsage: return 11;
  }
  return 1;
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace sanid
