#pragma once

#include <stdexcept>
#include <string>

namespace srefi {

// Error categories. The CLI maps these to exit codes: capacity-type
// failures exit 3, input/validation failures exit 2, I/O and internal
// failures exit 1.
enum class ErrorKind {
  Parse,
  Validation,
  Config,
  Data,
  MissingData,
  Shape,
  Geometry,
  Topology,
  Labeling,
  Numeric,
  Capacity,
  InsufficientDonors,
  Evaluation,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const;

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

const char* error_kind_name(ErrorKind kind);

}  // namespace srefi
