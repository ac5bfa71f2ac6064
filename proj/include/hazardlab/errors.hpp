#pragma once

#include <stdexcept>
#include <string>

namespace hazardlab {

/// Failure categories surfaced by the library. The CLI maps each category
/// family to a distinct process exit code (config=2, data=3, numeric=4, io=5).
enum class ErrorKind {
  config,
  invalid_input,
  unsupported_label,
  insufficient_data,
  undefined_metric,
  undefined_weight,
  degenerate_histogram,
  numeric,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept;

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace hazardlab
