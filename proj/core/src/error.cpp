#include "vipr/error.hpp"

namespace vipr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kParse: return "parse-error";
    case ErrorKind::kUnsupportedFormat: return "unsupported-format";
    case ErrorKind::kDegenerateRoi: return "degenerate-roi";
    case ErrorKind::kValidation: return "validation-error";
    case ErrorKind::kShape: return "shape-error";
    case ErrorKind::kBadMagic: return "bad-magic";
    case ErrorKind::kTruncated: return "truncated";
    case ErrorKind::kUndefinedAp: return "undefined-ap";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace vipr
