#pragma once

#include <span>
#include <vector>

// Lumped-parameter identification from static sweeps and free vibration.

namespace freelab::sysid {

enum class Axis { axial, torsional };

struct StaticLoadSample {
  double load = 0.0;          // [N] or [N m]
  double displacement = 0.0;  // [m] or [rad]
  Axis axis = Axis::axial;
};

struct StiffnessFit {
  double stiffness = 0.0;
  double rms_residual = 0.0;  // load units
};

/// Least-squares slope of load on displacement through the origin.
StiffnessFit fit_stiffness(std::span<const StaticLoadSample> samples);

struct VibrationTrace {
  std::vector<double> t;
  std::vector<double> displacement;
  Axis axis = Axis::axial;
};

struct DampingFit {
  double damping = 0.0;        // c
  double damping_ratio = 0.0;  // zeta
  double log_decrement = 0.0;  // mean delta over consecutive peak pairs
  int peaks = 0;
};

/// Logarithmic decrement over positive peaks above noise_floor times the
/// first peak. Peaks are refined by a parabola through three samples.
DampingFit fit_damping(const VibrationTrace& trace, double stiffness, double inertia,
                       double noise_floor = 0.01);

}  // namespace freelab::sysid
