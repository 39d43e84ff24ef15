#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "freelab/dynamics.hpp"

// PID pressure control of FREE rotation: controller law, closed-loop
// characteristic analysis, reference generation and closed-loop simulation.

namespace freelab::control {

using dynamics::FreeGeometry;
using dynamics::LumpedParams;
using dynamics::PressureBounds;

struct PidGains {
  double proportional = 0.0;  // K_p [Pa/rad]
  double integral = 0.0;      // K_i [Pa/(rad s)]
  double derivative = 0.0;    // K_d [Pa s/rad]
};

enum class GainAxis { proportional, integral, derivative };

double gain(const PidGains& g, GainAxis axis);
PidGains with_gain(PidGains g, GainAxis axis, double value);

struct PidOutput {
  double pressure = 0.0;
  bool saturated = false;  // unclamped command was outside the bounds
};

/// P = K_p (phi_d - phi) - K_d phi_dot + K_i * integral, clamped to bounds.
PidOutput pid_pressure(double phi_d, double phi, double phi_dot, double error_integral,
                       const PidGains& gains, const PressureBounds& bounds);

// Discrete PID with conditional integration: the error integral only
// advances on updates whose unclamped command stays inside the bounds.
class PidController {
 public:
  PidController(PidGains gains, PressureBounds bounds);

  double update(double phi_d, double phi, double phi_dot, double period);
  double integral() const { return integral_; }
  bool saturated() const { return saturated_; }

 private:
  PidGains gains_;
  PressureBounds bounds_;
  double integral_ = 0.0;
  bool saturated_ = false;
};

// Closed-loop characteristic equation with r and gamma frozen at the rest
// geometry: cubic phi''' + quadratic phi'' + linear phi' + constant phi =
// forcing.
struct ClosedLoopCoefficients {
  double cubic = 0.0;         // I_l
  double quadratic = 0.0;     // m K_d + c_t
  double proportional = 0.0;  // m K_p
  double linear = 0.0;        // m K_p + k_t
  double constant = 0.0;      // m K_i
};

/// m is the signed moment per unit pressure, -h 2 pi R^3 cot Gamma.
ClosedLoopCoefficients closed_loop_coefficients(const PidGains& gains,
                                                const FreeGeometry& geom,
                                                const LumpedParams& params);

using Roots3 = std::array<std::complex<double>, 3>;

/// Roots of a3 x^3 + a2 x^2 + a1 x + a0, sorted by real part then imaginary
/// part. Throws degenerate_leading_coefficient when a3 == 0.
Roots3 solve_cubic(double a3, double a2, double a1, double a0);

struct CharacteristicRoots {
  Roots3 roots;
  bool stable = false;  // all real parts < 0
  double max_real() const;
};

CharacteristicRoots characteristic_roots(const ClosedLoopCoefficients& coeffs);

struct LocusRow {
  double gain = 0.0;
  CharacteristicRoots roots;
};

std::vector<LocusRow> root_locus(const PidGains& base, GainAxis axis,
                                 std::span<const double> grid, const FreeGeometry& geom,
                                 const LumpedParams& params);

/// First destabilizing gain along `axis` within [lo, hi], located by
/// bisection on the sign of the largest real part. nullopt when the
/// stability verdict does not change across the interval.
std::optional<double> stability_boundary(const PidGains& base, GainAxis axis, double lo,
                                         double hi, const FreeGeometry& geom,
                                         const LumpedParams& params);

/// Closed-loop poles (z-plane) of the discrete controller running at
/// `period` with zero-order hold on the linearized rotational plant.
Roots3 sampled_loop_poles(const PidGains& gains, double period, const FreeGeometry& geom,
                          const LumpedParams& params);

double spectral_radius(const Roots3& z);

struct TuningReport {
  PidGains gains;
  double integral_boundary = 0.0;     // continuous, K_p = K_d = 0
  double derivative_boundary = 0.0;   // sampled-data, K_p = 0
  double proportional_boundary = 0.0; // sampled-data
};

/// Each gain at half of its stability boundary: K_i on the continuous root
/// locus, then K_d and K_p on the sampled-data loop at `period`. Gains carry
/// the sign of the moment per unit pressure.
TuningReport tune_gains(const FreeGeometry& geom, const LumpedParams& params, double period);

struct ReferencePoint {
  double angle = 0.0;  // [rad]
  double rate = 0.0;   // [rad/s]
};

class CubicTrajectory {
 public:
  CubicTrajectory(double start, double goal, double duration);

  /// Throws time_out_of_range outside [0, duration].
  ReferencePoint operator()(double t) const;

  double start() const { return start_; }
  double goal() const { return goal_; }
  double duration() const { return duration_; }

 private:
  double start_;
  double goal_;
  double duration_;
};

// Chain of segments starting from 0 rad. A segment with ramp == 0 is a step
// to its target; ramp > 0 follows a rest-to-rest cubic over `ramp` seconds
// and then holds.
class ReferenceSignal {
 public:
  struct Segment {
    double duration = 0.0;
    double target = 0.0;
    double ramp = 0.0;
  };

  explicit ReferenceSignal(std::vector<Segment> segments);

  struct Hold {
    double duration = 0.0;
    double angle = 0.0;
  };
  /// `incremental` accumulates each angle onto the previous target.
  static ReferenceSignal steps(std::span<const Hold> holds, bool incremental);
  static ReferenceSignal trajectory(std::span<const Hold> holds, double ramp);

  ReferencePoint operator()(double t) const;
  double duration() const;
  std::span<const Segment> segments() const { return segments_; }
  /// Start time of each segment.
  std::vector<double> switch_times() const;

 private:
  std::vector<Segment> segments_;
};

/// +50, -30, +60 deg increments held 3 s each.
ReferenceSignal step_scenario();
/// 40, 10, 70 deg cubic moves of 2 s within 3 s segments.
ReferenceSignal trajectory_scenario();

struct ClosedLoopOptions {
  dynamics::PlantModel plant = dynamics::PlantModel::nonlinear;
  double control_rate = 100.0;  // [Hz]
  double dt = 1e-4;             // plant step [s]
  double t_end = 0.0;           // 0 -> reference duration
  PressureBounds bounds{0.0, 7.0 * 6894.757};
  dynamics::LoadCondition load{};
};

struct ClosedLoopSample {
  double t = 0.0;
  double phi_d = 0.0;
  double phi = 0.0;
  double phi_dot = 0.0;
  double s = 0.0;
  double pressure = 0.0;
};

/// Controller updates at control_rate with the pressure zero-order held while
/// the plant advances with RK4 steps of dt. One sample per plant step.
std::vector<ClosedLoopSample> closed_loop_sim(const FreeGeometry& geom,
                                              const LumpedParams& params,
                                              const PidGains& gains,
                                              const ReferenceSignal& reference,
                                              const ClosedLoopOptions& options);

double rmsd(std::span<const double> a, std::span<const double> b);

/// Linear interpolation of (t, y) onto `grid`; clamps outside the range.
std::vector<double> resample(std::span<const double> t, std::span<const double> y,
                             std::span<const double> grid);

}  // namespace freelab::control
