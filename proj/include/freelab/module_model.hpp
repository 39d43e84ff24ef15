#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "freelab/dynamics.hpp"

// Four-FREE LR module on a rigid square plate, evaluated with a
// constant-curvature rigid-plate surrogate.

namespace freelab::module_model {

using dynamics::FreeGeometry;
using dynamics::LumpedParams;

// Actuator i sits at corner i of the square, counterclockwise from (+d, +d)
// in units of the half-diagonal projection. Actuators 0 and 2 share one
// handedness, 1 and 3 the other.
struct ModuleGeometry {
  std::array<FreeGeometry, 4> actuators;
  double half_diagonal = 0.015;  // d [m]
  LumpedParams params;

  void validate() const;
  /// Attachment point (x, y) of actuator i.
  std::array<double, 2> corner(std::size_t i) const;
  double rest_length() const { return actuators[0].length; }
};

/// Canonical LR module: 0 and 2 right-handed, 1 and 3 left-handed, default
/// lumped parameters of the actuator geometry.
ModuleGeometry lr_module(double winding_angle, double half_diagonal = 0.015);

struct ActuationPattern {
  int case_id = 0;  // 1..5, 0 for a custom pattern
  int variation = 0;
  std::array<bool, 4> active{};
  std::array<double, 4> pressure{};  // [Pa]
};

/// Variations of one case with `pressure` on every active actuator.
/// Counts per case are 1, 2, 4, 4, 4.
std::vector<ActuationPattern> enumerate_patterns(int case_id, double pressure = 0.0);
/// All 15 variations in canonical order.
std::vector<ActuationPattern> enumerate_all(double pressure = 0.0);

/// Moves the load of actuator i to actuator i+1 (90 deg about the axis).
ActuationPattern rotate_quarter(const ActuationPattern& p);

struct ActuatorResponse {
  double length = 0.0;  // l_i [m]
  double twist = 0.0;   // phi_i [rad]
};

ActuatorResponse actuator_response(const FreeGeometry& geom, const LumpedParams& params,
                                   double pressure);

struct EndEffectorPose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;        // along the module axis, relative to the rest tip
  double twist = 0.0;    // [rad]
  double azimuth = 0.0;  // bending direction [rad]; 0 when unbent
  double tilt = 0.0;     // plate tilt [rad]
};

/// Pose from the four actuator responses.
EndEffectorPose pose_from_responses(const ModuleGeometry& module,
                                    const std::array<ActuatorResponse, 4>& responses);

/// Errors from an actuator are rethrown with its index in the message.
EndEffectorPose module_pose(const ModuleGeometry& module, const ActuationPattern& pattern);

struct WorkspacePoint {
  int case_id = 0;
  int variation = 0;
  double pressure = 0.0;
  EndEffectorPose pose;
};

struct WorkspacePath {
  int case_id = 0;
  int variation = 0;
  std::vector<std::size_t> points;  // indices into Workspace::points, from the origin
  std::vector<std::size_t> levels;  // pressure-grid index of each point
};

struct WorkspaceFailure {
  int case_id = 0;
  int variation = 0;
  double pressure = 0.0;
  std::string reason;
};

struct Workspace {
  std::vector<WorkspacePoint> points;
  std::vector<WorkspacePath> paths;
  std::vector<WorkspaceFailure> failures;
  std::vector<std::array<std::size_t, 3>> boundary;  // triangles over point indices
};

/// Evaluates every variation of `cases` along `pressures`. A zero pressure
/// yields one shared origin point. Failed points are recorded, not fatal.
/// The boundary joins neighbouring case 3-5 paths, ordered by azimuth, with
/// triangles between equal pressure levels.
Workspace workspace(const ModuleGeometry& module, std::span<const int> cases,
                    std::span<const double> pressures);

/// 0 to 7 psi in 15 steps.
std::vector<double> default_pressure_grid();

/// Actuator i runs at mid + amp cos(2 pi t / period - i pi / 2), so at t = 0
/// actuator 0 is at `high`, actuator 2 at `low` and the others at the middle.
ActuationPattern stir_pattern(double low, double high, double period, double t);

}  // namespace freelab::module_model
