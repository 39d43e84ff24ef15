#include "freelab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <fmt/format.h>

#include "freelab/error.hpp"
#include "freelab/ode.hpp"

namespace freelab::dynamics {

using kinematics::configuration;
using kinematics::Handedness;

void LumpedParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::invalid_argument,
                  fmt::format("LumpedParams: {} must be > 0 (got {})", name, v));
    }
  };
  check(axial_stiffness, "axial_stiffness");
  check(torsional_stiffness, "torsional_stiffness");
  check(axial_damping, "axial_damping");
  check(torsional_damping, "torsional_damping");
  check(end_cap_mass, "end_cap_mass");
  check(end_cap_inertia, "end_cap_inertia");
}

LumpedParams default_lumped_params(const FreeGeometry& geom,
                                   const ElastomerModuli& moduli,
                                   double damping_ratio, double end_cap_mass) {
  const double ro = geom.outer_radius;
  const double ri = geom.inner_radius;
  const double wall_area = std::numbers::pi * (ro * ro - ri * ri);
  const double polar_moment = 0.5 * std::numbers::pi * (std::pow(ro, 4) - std::pow(ri, 4));

  LumpedParams p;
  p.axial_stiffness = moduli.youngs_modulus * wall_area / geom.length;
  p.torsional_stiffness = moduli.shear_modulus * polar_moment / geom.length;
  p.end_cap_mass = end_cap_mass;
  p.end_cap_inertia = 0.5 * end_cap_mass * ro * ro;
  p.axial_damping = 2.0 * damping_ratio * std::sqrt(p.axial_stiffness * p.end_cap_mass);
  p.torsional_damping =
      2.0 * damping_ratio * std::sqrt(p.torsional_stiffness * p.end_cap_inertia);
  return p;
}

void PressureBounds::validate() const {
  if (!(min >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "pressure lower bound must be >= 0 (no vacuum)");
  }
  if (!(max >= min) || !std::isfinite(max)) {
    throw Error(ErrorKind::invalid_argument, "pressure upper bound must be >= lower bound");
  }
}

double PressureBounds::clamp(double p) const { return std::clamp(p, min, max); }

PressureSignal::PressureSignal(std::function<double(double)> profile,
                               PressureBounds bounds)
    : profile_(std::move(profile)), bounds_(bounds) {
  bounds_.validate();
}

PressureSignal PressureSignal::constant(double pressure, PressureBounds bounds) {
  return PressureSignal([pressure](double) { return pressure; }, bounds);
}

PressureSignal PressureSignal::steps(std::vector<Breakpoint> breakpoints,
                                     PressureBounds bounds) {
  std::stable_sort(breakpoints.begin(), breakpoints.end(),
                   [](const auto& a, const auto& b) { return a.start < b.start; });
  return PressureSignal(
      [bp = std::move(breakpoints)](double t) {
        double p = 0.0;
        for (const auto& b : bp) {
          if (b.start <= t) p = b.pressure;
          else break;
        }
        return p;
      },
      bounds);
}

double PressureSignal::operator()(double t) const { return bounds_.clamp(profile_(t)); }

double elastomer_force(double s, double s_dot, const LumpedParams& p) {
  return -p.axial_stiffness * s - p.axial_damping * s_dot;
}

double elastomer_moment(double phi, double phi_dot, const LumpedParams& p) {
  return -p.torsional_stiffness * phi - p.torsional_damping * phi_dot;
}

namespace {

double checked_cot(double gamma) {
  if (!(gamma > 0.0 && gamma < std::numbers::pi / 2)) {
    throw Error(ErrorKind::degenerate_angle,
                fmt::format("winding angle {} rad outside (0, pi/2)", gamma));
  }
  return 1.0 / std::tan(gamma);
}

Accelerations balance(double r, double gamma, const DynamicState& x, double pressure,
                      const FreeGeometry& geom, const LumpedParams& params,
                      const LoadCondition& load) {
  const double force = load.force + elastomer_force(x.s, x.s_dot, params) +
                       pressure_force(r, gamma, pressure);
  const double moment = load.moment + elastomer_moment(x.phi, x.phi_dot, params) +
                        pressure_moment(r, gamma, pressure, geom.handedness);
  return {force / params.end_cap_mass, moment / params.end_cap_inertia};
}

}  // namespace

double pressure_force(double r, double gamma, double pressure) {
  const double cot = checked_cot(gamma);
  return std::numbers::pi * r * r * pressure * (1.0 - 2.0 * cot * cot);
}

double pressure_moment(double r, double gamma, double pressure, Handedness handedness) {
  const double cot = checked_cot(gamma);
  return -kinematics::sign(handedness) * 2.0 * std::numbers::pi * r * r * r * pressure * cot;
}

double moment_per_pressure(const FreeGeometry& geom) {
  return pressure_moment(geom.outer_radius, geom.winding_angle, 1.0, geom.handedness);
}

double linearized_pressure_for_twist(double phi, const FreeGeometry& geom,
                                     const LumpedParams& params, const LoadCondition& load) {
  return (params.torsional_stiffness * phi - load.moment) / moment_per_pressure(geom);
}

Accelerations eom_rhs(const DynamicState& x, double pressure, const FreeGeometry& geom,
                      const LumpedParams& params, const LoadCondition& load) {
  const auto c = configuration(geom, x.s, x.phi);
  return balance(c.r, c.gamma, x, pressure, geom, params, load);
}

Accelerations linearized_rhs(const DynamicState& x, double pressure,
                             const FreeGeometry& geom, const LumpedParams& params,
                             const LoadCondition& load) {
  return balance(geom.outer_radius, geom.winding_angle, x, pressure, geom, params, load);
}

Accelerations plant_rhs(PlantModel model, const DynamicState& x, double pressure,
                        const FreeGeometry& geom, const LumpedParams& params,
                        const LoadCondition& load) {
  return model == PlantModel::nonlinear ? eom_rhs(x, pressure, geom, params, load)
                                        : linearized_rhs(x, pressure, geom, params, load);
}

namespace {

using State4 = ode::Vec<4>;

State4 pack(const DynamicState& x) { return {x.s, x.s_dot, x.phi, x.phi_dot}; }
DynamicState unpack(const State4& y) { return {y[0], y[1], y[2], y[3]}; }

bool finite(const State4& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <class PressureAt>
State4 rk4(PlantModel model, const State4& y, double t, double h, PressureAt&& pressure_at,
           const FreeGeometry& geom, const LumpedParams& params, const LoadCondition& load) {
  auto f = [&](double tt, const State4& yy) -> State4 {
    const auto a = plant_rhs(model, unpack(yy), pressure_at(tt), geom, params, load);
    return {yy[1], a.axial, yy[3], a.angular};
  };
  return ode::rk4_step<4>(f, t, y, h);
}

}  // namespace

DynamicState step_plant(PlantModel model, const DynamicState& x, double pressure,
                        double dt, const FreeGeometry& geom,
                        const LumpedParams& params, const LoadCondition& load) {
  return unpack(rk4(model, pack(x), 0.0, dt, [pressure](double) { return pressure; },
                    geom, params, load));
}

std::vector<TimeSample> integrate(PlantModel model, const DynamicState& initial,
                                  const PressureSignal& pressure,
                                  const IntegrationOptions& options,
                                  const FreeGeometry& geom, const LumpedParams& params,
                                  const LoadCondition& load) {
  if (!(options.dt > 0.0)) throw Error(ErrorKind::invalid_argument, "dt must be > 0");
  if (!(options.t_end >= 0.0)) throw Error(ErrorKind::invalid_argument, "t_end must be >= 0");

  const auto steps = static_cast<long long>(std::ceil(options.t_end / options.dt - 1e-9));
  std::vector<TimeSample> series;
  series.reserve(static_cast<std::size_t>(steps) + 1);
  State4 y = pack(initial);
  series.push_back({0.0, initial, pressure(0.0)});
  for (long long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * options.dt;
    const double t_next = std::min(static_cast<double>(i + 1) * options.dt, options.t_end);
    y = rk4(model, y, t, t_next - t, pressure, geom, params, load);
    if (!finite(y)) {
      throw Error(ErrorKind::step_failure,
                  fmt::format("non-finite state at t = {:.9g} s", t_next));
    }
    series.push_back({t_next, unpack(y), pressure(t_next)});
  }
  return series;
}

// ---------------------------------------------------------------------------
// Static equilibrium

std::array<double, 2> static_residual(double s, double phi, double pressure,
                                      const FreeGeometry& geom, const LumpedParams& params,
                                      const LoadCondition& load) {
  const auto c = configuration(geom, s, phi);
  const double force = load.force - params.axial_stiffness * s +
                       pressure_force(c.r, c.gamma, pressure);
  const double moment = load.moment - params.torsional_stiffness * phi +
                        pressure_moment(c.r, c.gamma, pressure, geom.handedness);
  return {force / (params.axial_stiffness * geom.length), moment / params.torsional_stiffness};
}

namespace {

constexpr double residual_tol = 1e-12;

struct Point {
  double s = 0.0;
  double phi = 0.0;
};

double norm(const std::array<double, 2>& f) { return std::hypot(f[0], f[1]); }

class StaticProblem {
 public:
  StaticProblem(const FreeGeometry& geom, const LumpedParams& params)
      : geom_(geom), params_(params) {}

  std::optional<std::array<double, 2>> residual(const Point& x, double pressure,
                                                const LoadCondition& load) const {
    try {
      return static_residual(x.s, x.phi, pressure, geom_, params_, load);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  // Damped Newton; nullopt when it cannot reach the tolerance.
  std::optional<Point> newton(Point x, double pressure, const LoadCondition& load,
                              double& best_residual) const {
    auto f = residual(x, pressure, load);
    if (!f) return std::nullopt;
    const double ds = 1e-7 * geom_.length;
    const double dphi = 1e-7;
    for (int iter = 0; iter < 60; ++iter) {
      const double fn = norm(*f);
      best_residual = std::min(best_residual, fn);
      if (fn < residual_tol) return x;

      const auto fsp = residual({x.s + ds, x.phi}, pressure, load);
      const auto fsm = residual({x.s - ds, x.phi}, pressure, load);
      const auto fpp = residual({x.s, x.phi + dphi}, pressure, load);
      const auto fpm = residual({x.s, x.phi - dphi}, pressure, load);
      if (!fsp || !fsm || !fpp || !fpm) return std::nullopt;
      const double j00 = ((*fsp)[0] - (*fsm)[0]) / (2.0 * ds);
      const double j10 = ((*fsp)[1] - (*fsm)[1]) / (2.0 * ds);
      const double j01 = ((*fpp)[0] - (*fpm)[0]) / (2.0 * dphi);
      const double j11 = ((*fpp)[1] - (*fpm)[1]) / (2.0 * dphi);
      const double det = j00 * j11 - j01 * j10;
      if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
      const double step_s = -(j11 * (*f)[0] - j01 * (*f)[1]) / det;
      const double step_phi = -(-j10 * (*f)[0] + j00 * (*f)[1]) / det;

      bool accepted = false;
      for (double t = 1.0; t > 1e-6; t *= 0.5) {
        const Point trial{x.s + t * step_s, x.phi + t * step_phi};
        const auto ft = residual(trial, pressure, load);
        if (ft && norm(*ft) < (1.0 - 1e-4 * t) * fn) {
          x = trial;
          f = ft;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        return fn < 10.0 * residual_tol ? std::optional<Point>(x) : std::nullopt;
      }
    }
    return norm(*f) < residual_tol ? std::optional<Point>(x) : std::nullopt;
  }

  // Coarse residual grid over the feasible box, Newton from the best cells.
  std::optional<Point> grid_fallback(double pressure, const LoadCondition& load,
                                     double& best_residual) const {
    const double b = kinematics::fiber_length(geom_);
    const double theta = kinematics::wrap_angle(geom_);
    const double h = kinematics::sign(geom_.handedness);
    constexpr int n = 60;
    struct Cell {
      double r;
      Point x;
    };
    std::vector<Cell> cells;
    for (int i = 0; i < n; ++i) {
      const double s = -0.5 * geom_.length + (b - 0.5 * geom_.length) * (i + 0.5) / n;
      for (int j = 0; j < n; ++j) {
        // Wrap angle spans (0, 2 Theta).
        const double psi = 2.0 * theta * (j + 0.5) / n;
        const Point x{s, h * (psi - theta)};
        if (auto f = residual(x, pressure, load)) cells.push_back({norm(*f), x});
      }
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& c) { return a.r < c.r; });
    std::optional<Point> chosen;
    for (std::size_t k = 0; k < std::min<std::size_t>(cells.size(), 8); ++k) {
      best_residual = std::min(best_residual, cells[k].r);
      if (auto root = newton(cells[k].x, pressure, load, best_residual)) {
        // Prefer the root nearest the rest state.
        auto dist = [&](const Point& p) { return std::abs(p.s) / geom_.length + std::abs(p.phi); };
        if (!chosen || dist(*root) < dist(*chosen)) chosen = root;
      }
    }
    return chosen;
  }

 private:
  const FreeGeometry& geom_;
  const LumpedParams& params_;
};

}  // namespace

Equilibrium static_equilibrium(double pressure, const FreeGeometry& geom,
                               const LumpedParams& params, const LoadCondition& load) {
  if (!(pressure >= 0.0) || !std::isfinite(pressure)) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("pressure {} Pa must be finite and >= 0", pressure));
  }
  if (pressure == 0.0 && load.force == 0.0 && load.moment == 0.0) return {0.0, 0.0, 0.0};

  const StaticProblem problem(geom, params);
  auto scaled = [&](double lambda) {
    return std::pair{lambda * pressure, LoadCondition{lambda * load.force, lambda * load.moment}};
  };

  double best = std::numeric_limits<double>::infinity();
  Point current{0.0, 0.0};
  Point previous = current;
  double lambda = 0.0;
  double previous_lambda = 0.0;
  double dl = 0.05;
  while (lambda < 1.0) {
    const double next = std::min(1.0, lambda + dl);
    // Secant predictor along the continuation path.
    Point guess = current;
    if (lambda > 0.0 && lambda > previous_lambda) {
      const double w = (next - lambda) / (lambda - previous_lambda);
      guess = {current.s + w * (current.s - previous.s),
               current.phi + w * (current.phi - previous.phi)};
    }
    const auto [p, l] = scaled(next);
    double trial_best = std::numeric_limits<double>::infinity();
    auto root = problem.newton(guess, p, l, trial_best);
    if (!root && (guess.s != current.s || guess.phi != current.phi)) {
      root = problem.newton(current, p, l, trial_best);
    }
    const bool jumped = root && std::abs(root->phi - current.phi) > 0.25 + 2.0 * std::abs(guess.phi - current.phi);
    if (root && !jumped) {
      previous = current;
      previous_lambda = lambda;
      current = *root;
      lambda = next;
      dl = std::min(0.25, dl * 1.5);
      continue;
    }
    if (next == 1.0) best = std::min(best, trial_best);
    dl *= 0.5;
    if (dl < 1e-7) break;
  }

  if (lambda >= 1.0) {
    const auto f = static_residual(current.s, current.phi, pressure, geom, params, load);
    return {current.s, current.phi, norm(f)};
  }

  const double stalled_at = lambda * pressure;
  if (auto root = problem.grid_fallback(pressure, load, best)) {
    const auto f = static_residual(root->s, root->phi, pressure, geom, params, load);
    return {root->s, root->phi, norm(f)};
  }
  throw Error(ErrorKind::no_convergence,
              fmt::format("static equilibrium lost near P = {:.6g} Pa (target {:.6g} Pa); "
                          "best scaled residual {:.3g}",
                          stalled_at, pressure, best));
}

BlockedReactions blocked_reactions(double pressure, const FreeGeometry& geom) {
  return {pressure_force(geom.outer_radius, geom.winding_angle, pressure),
          pressure_moment(geom.outer_radius, geom.winding_angle, pressure, geom.handedness)};
}

std::vector<SweepRow> sweep_winding(const FreeGeometry& geometry_template,
                                    const ParamsForGeometry& params_for,
                                    std::span<const double> winding_angles,
                                    std::span<const double> pressures) {
  std::vector<SweepRow> rows;
  rows.reserve(winding_angles.size() * pressures.size());
  for (const double gamma : winding_angles) {
    const FreeGeometry geom = geometry_template.with_winding_angle(gamma);
    const LumpedParams params = params_for(geom);
    for (const double p : pressures) {
      SweepRow row;
      row.winding_angle = gamma;
      row.pressure = p;
      const auto blocked = blocked_reactions(p, geom);
      row.blocked_force = blocked.force;
      row.blocked_moment = blocked.moment;
      try {
        const auto eq = static_equilibrium(p, geom, params);
        const double l = geom.length + eq.s;
        row.twist_per_length = eq.phi / l;
        row.extension_ratio = l / geom.length;
      } catch (const Error& e) {
        row.twist_per_length = std::numeric_limits<double>::quiet_NaN();
        row.extension_ratio = std::numeric_limits<double>::quiet_NaN();
        row.status = std::string(to_string(e.kind()));
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace freelab::dynamics
