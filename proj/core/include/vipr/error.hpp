#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vipr {

enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kUnsupportedFormat,
  kDegenerateRoi,
  kValidation,
  kShape,
  kBadMagic,
  kTruncated,
  kUndefinedAp,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can tell data problems from programming errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix, for re-raising with added context.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace vipr
