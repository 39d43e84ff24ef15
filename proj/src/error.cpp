#include "freelab/error.hpp"

namespace freelab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::infeasible_extension: return "InfeasibleExtension";
    case ErrorKind::unwound_singularity: return "UnwoundSingularity";
    case ErrorKind::non_positive_stretch: return "NonPositiveStretch";
    case ErrorKind::out_of_range_hardness: return "OutOfRangeHardness";
    case ErrorKind::insufficient_data: return "InsufficientData";
    case ErrorKind::no_minimum_in_interval: return "NoMinimumInInterval";
    case ErrorKind::degenerate_angle: return "DegenerateAngle";
    case ErrorKind::step_failure: return "StepFailure";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::degenerate_leading_coefficient: return "DegenerateLeadingCoefficient";
    case ErrorKind::time_out_of_range: return "TimeOutOfRange";
    case ErrorKind::not_underdamped: return "NotUnderdamped";
    case ErrorKind::insufficient_peaks: return "InsufficientPeaks";
    case ErrorKind::zero_displacement_range: return "ZeroDisplacementRange";
    case ErrorKind::config: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace freelab
