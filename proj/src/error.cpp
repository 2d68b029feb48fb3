#include "ofc/error.hpp"

namespace ofc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::out_of_domain: return "out-of-domain";
    case ErrorCode::invalid_shape: return "invalid-shape";
    case ErrorCode::grid_mismatch: return "grid-mismatch";
    case ErrorCode::degenerate_data: return "degenerate-data";
    case ErrorCode::empty_mass: return "empty-mass";
    case ErrorCode::empty_confusion: return "empty-confusion";
    case ErrorCode::length_mismatch: return "length-mismatch";
    case ErrorCode::vanishing_positive_mass: return "vanishing-positive-mass";
    case ErrorCode::step_rejected: return "step-rejected";
    case ErrorCode::degenerate_model: return "degenerate-model";
    case ErrorCode::io_failure: return "io-failure";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::format_version_mismatch: return "format-version-mismatch";
    case ErrorCode::insufficient_class_samples: return "insufficient-class-samples";
    case ErrorCode::invalid_database: return "invalid-database-id";
    case ErrorCode::dimension_error: return "dimension-error";
  }
  return "unknown";
}

}  // namespace ofc
