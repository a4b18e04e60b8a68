#pragma once

#include <stdexcept>
#include <string>

namespace sanid {

// Every failure raised by the library carries one of these kinds. The CLI
// maps each kind to its own exit code and a greppable error code string.
enum class ErrorKind {
  kDimension,
  kPrecondition,
  kNumeric,
  kIndex,
  kUsage,
  kData,
  kIo,
  kConfig,
  kCheckpoint,
};

const char* error_code(ErrorKind kind) noexcept;
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace sanid
