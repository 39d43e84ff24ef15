#include "freelab/kinematics.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "freelab/error.hpp"

namespace freelab::kinematics {

FreeGeometry FreeGeometry::make(double length, double inner_radius, double wall,
                                double winding_angle, Handedness handedness,
                                int n_fibers) {
  FreeGeometry g;
  g.length = length;
  g.inner_radius = inner_radius;
  g.wall = wall;
  g.outer_radius = inner_radius + wall;
  g.winding_angle = winding_angle;
  g.handedness = handedness;
  g.n_fibers = n_fibers;
  g.validate();
  return g;
}

void FreeGeometry::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::invalid_argument, "FreeGeometry: " + what);
  };
  if (!(length > 0.0) || !std::isfinite(length)) fail("length must be > 0");
  if (!(inner_radius > 0.0)) fail("inner radius must be > 0");
  if (!(wall > 0.0)) fail("wall thickness must be > 0");
  if (std::abs(outer_radius - (inner_radius + wall)) > 1e-12 * outer_radius) {
    fail("outer radius must equal inner radius + wall");
  }
  if (!(winding_angle > 0.0 && winding_angle < std::numbers::pi / 2)) {
    fail(fmt::format("winding angle {} rad outside (0, pi/2)", winding_angle));
  }
  if (handedness != Handedness::left && handedness != Handedness::right) {
    fail("handedness must be +1 or -1");
  }
  if (n_fibers < 1) fail("at least one fiber required");
}

FreeGeometry FreeGeometry::with_winding_angle(double gamma) const {
  FreeGeometry g = *this;
  g.winding_angle = gamma;
  g.validate();
  return g;
}

FreeGeometry FreeGeometry::with_handedness(Handedness h) const {
  FreeGeometry g = *this;
  g.handedness = h;
  return g;
}

FreeGeometry canonical_geometry(double winding_angle, Handedness handedness) {
  return FreeGeometry::make(0.175, 0.5 * 9.52e-3, 0.8e-3, winding_angle,
                            handedness, 6);
}

double wrap_angle(const FreeGeometry& geom) {
  return geom.length * std::tan(geom.winding_angle) / geom.outer_radius;
}

double fiber_length(const FreeGeometry& geom) {
  return geom.length / std::cos(geom.winding_angle);
}

FreeConfiguration configuration(const FreeGeometry& geom, double s, double phi) {
  const double b = fiber_length(geom);
  const double l = geom.length + s;
  if (!(l < b)) {
    throw Error(ErrorKind::infeasible_extension,
                fmt::format("fiber taut: l = {:.9g} m >= b = {:.9g} m", l, b));
  }
  if (!(l > 0.0)) {
    throw Error(ErrorKind::infeasible_extension,
                fmt::format("non-positive length l = {:.9g} m", l));
  }
  const double psi = wrap_angle(geom) + sign(geom.handedness) * phi;
  if (!(psi > 0.0)) {
    throw Error(ErrorKind::unwound_singularity,
                fmt::format("wrap angle psi = {:.9g} rad <= 0", psi));
  }
  // (b - l)(b + l) avoids cancellation in b^2 - l^2 at small winding angles.
  const double wrapped = std::sqrt((b - l) * (b + l));
  FreeConfiguration c;
  c.s = s;
  c.phi = phi;
  c.l = l;
  c.psi = psi;
  c.r = wrapped / psi;
  c.gamma = std::atan2(wrapped, l);
  return c;
}

double inextensibility_defect(const FreeGeometry& geom,
                              const FreeConfiguration& config) {
  const double b = fiber_length(geom);
  const double rp = config.r * config.psi;
  return std::abs(config.l * config.l + rp * rp - b * b) / (b * b);
}

}  // namespace freelab::kinematics
