#pragma once

// Helical inextensible-fiber geometry of a single FREE.
//
// A fiber of fixed length b wraps the tube at the fiber-layer radius. With the
// proximal end fixed, the free end displaces axially by s and rotates by phi.
// The fiber then satisfies l^2 + (r psi)^2 = b^2 with l = L + s and
// psi = Theta + h*phi, where h is the winding handedness.

namespace freelab::kinematics {

enum class Handedness : int { left = -1, right = +1 };

constexpr double sign(Handedness h) { return static_cast<int>(h); }

struct FreeGeometry {
  double length = 0.0;        // L [m]
  double outer_radius = 0.0;  // R, fiber layer [m]
  double inner_radius = 0.0;  // [m]
  double wall = 0.0;          // [m]
  double winding_angle = 0.0; // Gamma [rad]
  Handedness handedness = Handedness::right;
  int n_fibers = 1;

  // Builds a geometry whose outer radius is inner_radius + wall.
  static FreeGeometry make(double length, double inner_radius, double wall,
                           double winding_angle,
                           Handedness handedness = Handedness::right,
                           int n_fibers = 6);

  // Throws Error(invalid_argument) naming the violated invariant.
  void validate() const;

  FreeGeometry with_winding_angle(double gamma) const;
  FreeGeometry with_handedness(Handedness h) const;
};

// 175 mm long, 9.52 mm inner diameter, 0.8 mm wall, six fibers.
FreeGeometry canonical_geometry(double winding_angle,
                                Handedness handedness = Handedness::right);

struct FreeConfiguration {
  double s = 0.0;      // axial displacement of the free end [m]
  double phi = 0.0;    // rotation of the free end [rad]
  double l = 0.0;      // current length [m]
  double r = 0.0;      // current fiber-layer radius [m]
  double gamma = 0.0;  // current winding angle [rad]
  double psi = 0.0;    // current total wrap angle [rad]
};

/// Total initial wrap angle Theta = L tan(Gamma) / R.
double wrap_angle(const FreeGeometry& geom);

/// Fiber length b = L / cos(Gamma).
double fiber_length(const FreeGeometry& geom);

/// Deformed geometry at free-end displacement s and rotation phi.
/// Throws infeasible_extension when l >= b and unwound_singularity when
/// psi <= 0.
FreeConfiguration configuration(const FreeGeometry& geom, double s, double phi);

/// Relative inextensibility defect |l^2 + (r psi)^2 - b^2| / b^2.
double inextensibility_defect(const FreeGeometry& geom,
                              const FreeConfiguration& config);

}  // namespace freelab::kinematics
