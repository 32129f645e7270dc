#include "srefi/error.hpp"

namespace srefi {

int Error::exit_code() const {
  switch (kind_) {
    case ErrorKind::Capacity:
    case ErrorKind::InsufficientDonors:
      return 3;
    case ErrorKind::Io:
      return 1;
    default:
      return 2;
  }
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Config: return "config";
    case ErrorKind::Data: return "data";
    case ErrorKind::MissingData: return "missing-data";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Topology: return "topology";
    case ErrorKind::Labeling: return "labeling";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::InsufficientDonors: return "insufficient-donors";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace srefi
