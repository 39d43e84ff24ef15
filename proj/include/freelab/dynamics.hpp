#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "freelab/kinematics.hpp"

// Lumped-parameter dynamics of a single FREE: end-cap mass and inertia on
// linear elastomer springs/dampers, driven by the fiber-constrained pressure
// force and moment.

namespace freelab::dynamics {

using kinematics::FreeGeometry;

struct LumpedParams {
  double axial_stiffness = 0.0;      // k_e [N/m]
  double torsional_stiffness = 0.0;  // k_t [N m/rad]
  double axial_damping = 0.0;        // c_e [N s/m]
  double torsional_damping = 0.0;    // c_t [N m s/rad]
  double end_cap_mass = 0.0;         // m_l [kg]
  double end_cap_inertia = 0.0;      // I_l [kg m^2]
  void validate() const;
};

struct ElastomerModuli {
  double youngs_modulus = 1.18e6;  // [Pa]
  double shear_modulus = 1.18e6 / 3.0;
};

// Defaults derived from the tube cross-section and the calibrated elastomer:
// k_e = E A_wall / L, k_t = mu J / L, damping ratio on both axes,
// I_l = m_l R^2 / 2.
LumpedParams default_lumped_params(const FreeGeometry& geom,
                                   const ElastomerModuli& moduli = {},
                                   double damping_ratio = 0.1,
                                   double end_cap_mass = 0.005);

struct LoadCondition {
  double force = 0.0;   // F_l [N]
  double moment = 0.0;  // M_l [N m]
};

struct DynamicState {
  double s = 0.0;
  double s_dot = 0.0;
  double phi = 0.0;
  double phi_dot = 0.0;
};

struct Accelerations {
  double axial = 0.0;    // s_ddot [m/s^2]
  double angular = 0.0;  // phi_ddot [rad/s^2]
};

struct PressureBounds {
  double min = 0.0;  // [Pa]
  double max = 0.0;  // [Pa]
  void validate() const;
  double clamp(double p) const;
};

// Time-varying supply pressure, clamped to its bounds on every query.
class PressureSignal {
 public:
  PressureSignal(std::function<double(double)> profile, PressureBounds bounds);

  static PressureSignal constant(double pressure, PressureBounds bounds);
  // Piecewise-constant: value of the last breakpoint with start <= t, zero
  // before the first breakpoint.
  struct Breakpoint {
    double start = 0.0;
    double pressure = 0.0;
  };
  static PressureSignal steps(std::vector<Breakpoint> breakpoints,
                              PressureBounds bounds);

  double operator()(double t) const;
  const PressureBounds& bounds() const { return bounds_; }

 private:
  std::function<double(double)> profile_;
  PressureBounds bounds_;
};

double elastomer_force(double s, double s_dot, const LumpedParams& p);
double elastomer_moment(double phi, double phi_dot, const LumpedParams& p);

/// pi r^2 P (1 - 2 cot^2 gamma). Throws degenerate_angle outside (0, pi/2).
double pressure_force(double r, double gamma, double pressure);
/// -h 2 pi r^3 P cot gamma.
double pressure_moment(double r, double gamma, double pressure,
                       kinematics::Handedness handedness);

/// Signed moment per unit pressure at the undeformed geometry,
/// -h 2 pi R^3 cot Gamma [N m / Pa].
double moment_per_pressure(const FreeGeometry& geom);

/// Pressure holding rotation phi in the linearized model:
/// (k_t phi - M_l) / moment_per_pressure.
double linearized_pressure_for_twist(double phi, const FreeGeometry& geom,
                                     const LumpedParams& params,
                                     const LoadCondition& load = {});

enum class PlantModel { nonlinear, linearized };

Accelerations eom_rhs(const DynamicState& x, double pressure,
                      const FreeGeometry& geom, const LumpedParams& params,
                      const LoadCondition& load = {});

/// Same balance with r and gamma frozen at R and Gamma.
Accelerations linearized_rhs(const DynamicState& x, double pressure,
                             const FreeGeometry& geom, const LumpedParams& params,
                             const LoadCondition& load = {});

Accelerations plant_rhs(PlantModel model, const DynamicState& x, double pressure,
                        const FreeGeometry& geom, const LumpedParams& params,
                        const LoadCondition& load = {});

/// One RK4 step of the plant with pressure held at `pressure`.
DynamicState step_plant(PlantModel model, const DynamicState& x, double pressure,
                        double dt, const FreeGeometry& geom,
                        const LumpedParams& params, const LoadCondition& load = {});

struct TimeSample {
  double t = 0.0;
  DynamicState state;
  double pressure = 0.0;
};

struct IntegrationOptions {
  double t_end = 1.0;
  double dt = 1e-4;
};

/// Fixed-step RK4 from `initial`. The pressure signal is sampled at every
/// stage time. Throws step_failure (with the failure time) on a non-finite
/// state; kinematic infeasibility propagates.
std::vector<TimeSample> integrate(PlantModel model, const DynamicState& initial,
                                  const PressureSignal& pressure,
                                  const IntegrationOptions& options,
                                  const FreeGeometry& geom,
                                  const LumpedParams& params,
                                  const LoadCondition& load = {});

struct Equilibrium {
  double s = 0.0;
  double phi = 0.0;
  double residual = 0.0;  // scaled residual norm
};

/// Residuals of the static balance, scaled by (k_e L) and k_t.
std::array<double, 2> static_residual(double s, double phi, double pressure,
                                      const FreeGeometry& geom,
                                      const LumpedParams& params,
                                      const LoadCondition& load);

/// Static balance of both equations of motion. Damped Newton with a
/// central-difference Jacobian, continued in pressure and load from the
/// unloaded rest state; a residual-grid search seeds a last Newton attempt if
/// continuation stalls. Throws no_convergence carrying the best residual.
Equilibrium static_equilibrium(double pressure, const FreeGeometry& geom,
                               const LumpedParams& params,
                               const LoadCondition& load = {});

struct BlockedReactions {
  double force = 0.0;
  double moment = 0.0;
};

/// Both ends pinned: s = phi = 0, so r = R and gamma = Gamma.
BlockedReactions blocked_reactions(double pressure, const FreeGeometry& geom);

struct SweepRow {
  double winding_angle = 0.0;   // [rad]
  double pressure = 0.0;        // [Pa]
  double twist_per_length = 0.0;  // tau = phi*/l [rad/m]
  double extension_ratio = 0.0;   // lambda_ext = l/L
  double blocked_force = 0.0;
  double blocked_moment = 0.0;
  std::string status = "ok";  // "ok" or the error kind of the free-end solve
};

using ParamsForGeometry = std::function<LumpedParams(const FreeGeometry&)>;

/// Free-end and blocked quantities over a winding-angle x pressure grid,
/// rows ordered by angle then pressure.
std::vector<SweepRow> sweep_winding(const FreeGeometry& geometry_template,
                                    const ParamsForGeometry& params_for,
                                    std::span<const double> winding_angles,
                                    std::span<const double> pressures);

}  // namespace freelab::dynamics
