#include "freelab/sysid.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "freelab/error.hpp"

namespace freelab::sysid {

StiffnessFit fit_stiffness(std::span<const StaticLoadSample> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("stiffness fit needs at least 2 samples, got {}", samples.size()));
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& s : samples) {
    if (s.axis != samples.front().axis) {
      throw Error(ErrorKind::invalid_argument, "stiffness samples mix axial and torsional data");
    }
    if (!std::isfinite(s.load) || !std::isfinite(s.displacement)) {
      throw Error(ErrorKind::invalid_argument, "stiffness samples must be finite");
    }
    sxy += s.displacement * s.load;
    sxx += s.displacement * s.displacement;
  }
  if (sxx == 0.0) {
    throw Error(ErrorKind::zero_displacement_range, "all displacements are zero");
  }
  StiffnessFit fit;
  fit.stiffness = sxy / sxx;
  double ss = 0.0;
  for (const auto& s : samples) {
    const double r = s.load - fit.stiffness * s.displacement;
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(samples.size()));
  return fit;
}

DampingFit fit_damping(const VibrationTrace& trace, double stiffness, double inertia,
                       double noise_floor) {
  const auto& y = trace.displacement;
  if (trace.t.size() != y.size() || y.size() < 3) {
    throw Error(ErrorKind::insufficient_data, "vibration trace needs >= 3 matching samples");
  }
  if (!(stiffness > 0.0) || !(inertia > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "stiffness and inertia must be > 0");
  }
  const double period = trace.t[1] - trace.t[0];
  if (!(period > 0.0)) throw Error(ErrorKind::invalid_argument, "trace time must increase");
  for (std::size_t i = 1; i < trace.t.size(); ++i) {
    const double d = trace.t[i] - trace.t[i - 1];
    if (std::abs(d - period) > 1e-6 * period) {
      throw Error(ErrorKind::invalid_argument,
                  fmt::format("trace is not uniformly sampled at row {}", i));
    }
  }

  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > 0.0)) continue;
    const double curvature = y[i - 1] - 2.0 * y[i] + y[i + 1];
    double value = y[i];
    if (curvature < 0.0) {
      const double slope = 0.5 * (y[i + 1] - y[i - 1]);
      value = y[i] - 0.5 * slope * slope / curvature;
    }
    if (!peaks.empty() && value < noise_floor * peaks.front()) break;
    peaks.push_back(value);
  }
  if (peaks.empty()) throw Error(ErrorKind::not_underdamped, "trace has no oscillation peaks");
  if (peaks.size() < 2) throw Error(ErrorKind::insufficient_peaks, "trace has a single peak");

  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i) sum += std::log(peaks[i] / peaks[i + 1]);
  const double delta = sum / static_cast<double>(peaks.size() - 1);
  // Peak interpolation error shows up as tiny apparent growth in undamped traces.
  if (delta < -1e-6) throw Error(ErrorKind::not_underdamped, "oscillation amplitude grows");

  DampingFit fit;
  fit.log_decrement = std::max(delta, 0.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  fit.damping_ratio = fit.log_decrement / std::sqrt(two_pi * two_pi + fit.log_decrement * fit.log_decrement);
  fit.damping = 2.0 * fit.damping_ratio * std::sqrt(stiffness * inertia);
  fit.peaks = static_cast<int>(peaks.size());
  return fit;
}

}  // namespace freelab::sysid
