#pragma once

#include <stdexcept>
#include <string>

namespace ofc {

enum class ErrorCode {
  invalid_argument,
  out_of_domain,
  invalid_shape,
  grid_mismatch,
  degenerate_data,
  empty_mass,
  empty_confusion,
  length_mismatch,
  vanishing_positive_mass,
  step_rejected,
  degenerate_model,
  io_failure,
  parse_error,
  format_version_mismatch,
  insufficient_class_samples,
  invalid_database,
  dimension_error,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Data errors come from the inputs; numerical errors from the flow itself.
inline bool is_numerical(ErrorCode code) {
  return code == ErrorCode::vanishing_positive_mass ||
         code == ErrorCode::step_rejected || code == ErrorCode::empty_mass;
}

}  // namespace ofc
