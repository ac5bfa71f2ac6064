#include "hazardlab/errors.hpp"

namespace hazardlab {

namespace {

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::unsupported_label: return "unsupported-label";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::undefined_metric: return "undefined-metric";
    case ErrorKind::undefined_weight: return "undefined-weight";
    case ErrorKind::degenerate_histogram: return "degenerate-histogram";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + message), kind_(kind) {}

int Error::exit_code() const noexcept {
  switch (kind_) {
    case ErrorKind::config:
      return 2;
    case ErrorKind::invalid_input:
    case ErrorKind::unsupported_label:
    case ErrorKind::insufficient_data:
    case ErrorKind::undefined_metric:
    case ErrorKind::undefined_weight:
    case ErrorKind::degenerate_histogram:
      return 3;
    case ErrorKind::numeric:
      return 4;
    case ErrorKind::io:
      return 5;
  }
  return 1;
}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace hazardlab
