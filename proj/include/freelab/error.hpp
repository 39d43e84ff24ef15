#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freelab {

enum class ErrorKind {
  invalid_argument,
  infeasible_extension,
  unwound_singularity,
  non_positive_stretch,
  out_of_range_hardness,
  insufficient_data,
  no_minimum_in_interval,
  degenerate_angle,
  step_failure,
  no_convergence,
  degenerate_leading_coefficient,
  time_out_of_range,
  not_underdamped,
  insufficient_peaks,
  zero_displacement_range,
  config,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Numeric and contract failures raised by every module. Config/parse
// failures use ErrorKind::config; everything else is numeric.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace freelab
