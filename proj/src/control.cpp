#include "freelab/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "freelab/error.hpp"
#include "freelab/ode.hpp"

namespace freelab::control {

using Complex = std::complex<double>;

double gain(const PidGains& g, GainAxis axis) {
  switch (axis) {
    case GainAxis::proportional: return g.proportional;
    case GainAxis::integral: return g.integral;
    case GainAxis::derivative: return g.derivative;
  }
  return 0.0;
}

PidGains with_gain(PidGains g, GainAxis axis, double value) {
  switch (axis) {
    case GainAxis::proportional: g.proportional = value; break;
    case GainAxis::integral: g.integral = value; break;
    case GainAxis::derivative: g.derivative = value; break;
  }
  return g;
}

PidOutput pid_pressure(double phi_d, double phi, double phi_dot, double error_integral,
                       const PidGains& gains, const PressureBounds& bounds) {
  const double command = gains.proportional * (phi_d - phi) - gains.derivative * phi_dot +
                         gains.integral * error_integral;
  const bool saturated = command < bounds.min || command > bounds.max;
  return {bounds.clamp(command), saturated};
}

PidController::PidController(PidGains gains, PressureBounds bounds)
    : gains_(gains), bounds_(bounds) {
  bounds_.validate();
}

double PidController::update(double phi_d, double phi, double phi_dot, double period) {
  const double candidate = integral_ + (phi_d - phi) * period;
  const auto out = pid_pressure(phi_d, phi, phi_dot, candidate, gains_, bounds_);
  saturated_ = out.saturated;
  if (!saturated_) integral_ = candidate;
  return out.pressure;
}

ClosedLoopCoefficients closed_loop_coefficients(const PidGains& gains,
                                                const FreeGeometry& geom,
                                                const LumpedParams& params) {
  const double m = dynamics::moment_per_pressure(geom);
  ClosedLoopCoefficients k;
  k.cubic = params.end_cap_inertia;
  k.quadratic = m * gains.derivative + params.torsional_damping;
  k.proportional = m * gains.proportional;
  k.linear = k.proportional + params.torsional_stiffness;
  k.constant = m * gains.integral;
  return k;
}

// ---------------------------------------------------------------------------
// Cubic roots

namespace {

Complex horner(double a3, double a2, double a1, double a0, Complex x) {
  return ((a3 * x + a2) * x + a1) * x + a0;
}

Complex horner_derivative(double a3, double a2, double a1, Complex x) {
  return (3.0 * a3 * x + 2.0 * a2) * x + a1;
}

// Damped Newton: halves the step until the residual decreases.
Complex polish(double a3, double a2, double a1, double a0, Complex x) {
  for (int i = 0; i < 60; ++i) {
    const Complex fx = horner(a3, a2, a1, a0, x);
    const Complex dfx = horner_derivative(a3, a2, a1, x);
    if (fx == 0.0 || dfx == 0.0) break;
    const Complex step = fx / dfx;
    if (std::abs(step) <= 1e-17 * std::abs(x)) break;
    bool improved = false;
    for (double lambda = 1.0; lambda > 1e-9; lambda *= 0.5) {
      const Complex next = x - lambda * step;
      if (std::abs(horner(a3, a2, a1, a0, next)) < std::abs(fx)) {
        x = next;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return x;
}

// Real root of the monic cubic x^3 + a x^2 + b x + c.
double real_root(double a, double b, double c) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  double t = 0.0;
  if (disc > 0.0) {
    const double u = std::cbrt(-0.5 * q - std::copysign(std::sqrt(disc), q));
    t = u != 0.0 ? u - p / (3.0 * u) : 0.0;
  } else if (p < 0.0) {
    // Three real roots; return the one of largest magnitude.
    const double arg = std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
    const double radius = 2.0 * std::sqrt(-p / 3.0);
    double best = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double x =
          radius * std::cos((std::acos(arg) - 2.0 * std::numbers::pi * k) / 3.0) - a / 3.0;
      if (std::abs(x) > std::abs(best)) best = x;
    }
    return best;
  }
  return t - a / 3.0;
}

void sort_roots(Roots3& r) {
  std::sort(r.begin(), r.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

}  // namespace

Roots3 solve_cubic(double a3, double a2, double a1, double a0) {
  if (a3 == 0.0 || !std::isfinite(a3)) {
    throw Error(ErrorKind::degenerate_leading_coefficient,
                fmt::format("leading coefficient {} is not usable", a3));
  }
  const double a = a2 / a3;
  const double b = a1 / a3;
  const double c = a0 / a3;

  double x0 = 0.0;
  if (c != 0.0) {
    x0 = real_root(a, b, c);
    x0 = polish(1.0, a, b, c, x0).real();
  }
  // Deflate to x^2 + e x + f. Backward deflation is the stable one when x0
  // dominates the other two roots, forward deflation otherwise.
  double e = a + x0;
  double f = b + e * x0;
  if (x0 != 0.0 && std::abs(x0) * x0 * x0 > std::abs(c)) {
    f = -c / x0;
    e = (f - b) / x0;
  }

  Complex r1;
  Complex r2;
  const double disc = e * e - 4.0 * f;
  if (disc >= 0.0) {
    const double q = -0.5 * (e + std::copysign(std::sqrt(disc), e));
    r1 = q;
    r2 = q != 0.0 ? f / q : 0.0;
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    r1 = Complex(-0.5 * e, -im);
    r2 = Complex(-0.5 * e, im);
  }
  if (c != 0.0) {
    r1 = polish(1.0, a, b, c, r1);
    // The pair stays exactly conjugate.
    r2 = disc < 0.0 ? std::conj(r1) : polish(1.0, a, b, c, r2);
  }
  Roots3 roots{Complex(x0, 0.0), r1, r2};
  sort_roots(roots);
  return roots;
}

double CharacteristicRoots::max_real() const {
  double m = roots[0].real();
  for (const auto& r : roots) m = std::max(m, r.real());
  return m;
}

CharacteristicRoots characteristic_roots(const ClosedLoopCoefficients& k) {
  CharacteristicRoots out;
  out.roots = solve_cubic(k.cubic, k.quadratic, k.linear, k.constant);
  out.stable = out.max_real() < 0.0;
  return out;
}

std::vector<LocusRow> root_locus(const PidGains& base, GainAxis axis,
                                 std::span<const double> grid, const FreeGeometry& geom,
                                 const LumpedParams& params) {
  std::vector<LocusRow> rows;
  rows.reserve(grid.size());
  for (const double g : grid) {
    rows.push_back({g, characteristic_roots(
                           closed_loop_coefficients(with_gain(base, axis, g), geom, params))});
  }
  return rows;
}

namespace {

template <class IsStable>
std::optional<double> bisect_boundary(double lo, double hi, IsStable&& is_stable) {
  const bool lo_stable = is_stable(lo);
  if (lo_stable == is_stable(hi)) return std::nullopt;
  for (int i = 0; i < 200 && std::abs(hi - lo) > 1e-12 * std::max(std::abs(lo), std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (is_stable(mid) == lo_stable) lo = mid;
    else hi = mid;
  }
  return hi;
}

}  // namespace

std::optional<double> stability_boundary(const PidGains& base, GainAxis axis, double lo,
                                         double hi, const FreeGeometry& geom,
                                         const LumpedParams& params) {
  return bisect_boundary(lo, hi, [&](double g) {
    return characteristic_roots(closed_loop_coefficients(with_gain(base, axis, g), geom, params))
        .stable;
  });
}

// ---------------------------------------------------------------------------
// Sampled-data loop

namespace {

struct ZeroOrderHold {
  std::array<std::array<double, 2>, 2> phi;  // state transition
  std::array<double, 2> gamma;               // input response
};

ZeroOrderHold discretize(double period, const FreeGeometry& geom, const LumpedParams& params) {
  const double m = dynamics::moment_per_pressure(geom);
  const double inertia = params.end_cap_inertia;
  auto flow = [&](double pressure) {
    return [&, pressure](double, const ode::Vec<2>& y) -> ode::Vec<2> {
      return {y[1], (-params.torsional_stiffness * y[0] - params.torsional_damping * y[1] +
                     m * pressure) / inertia};
    };
  };
  constexpr int substeps = 400;
  const double h = period / substeps;
  auto propagate = [&](ode::Vec<2> y, double pressure) {
    const auto f = flow(pressure);
    for (int i = 0; i < substeps; ++i) y = ode::rk4_step<2>(f, 0.0, y, h);
    return y;
  };
  ZeroOrderHold zoh;
  const auto c0 = propagate({1.0, 0.0}, 0.0);
  const auto c1 = propagate({0.0, 1.0}, 0.0);
  zoh.phi = {{{c0[0], c1[0]}, {c0[1], c1[1]}}};
  zoh.gamma = propagate({0.0, 0.0}, 1.0);
  return zoh;
}

}  // namespace

Roots3 sampled_loop_poles(const PidGains& gains, double period, const FreeGeometry& geom,
                          const LumpedParams& params) {
  if (!(period > 0.0)) throw Error(ErrorKind::invalid_argument, "control period must be > 0");
  const auto zoh = discretize(period, geom, params);
  // State (phi, phi_dot, error integral) at zero reference.
  const double kx0 = -(gains.proportional + gains.integral * period);
  const double kx1 = -gains.derivative;
  const double kx2 = gains.integral;
  double a[3][3] = {
      {zoh.phi[0][0] + zoh.gamma[0] * kx0, zoh.phi[0][1] + zoh.gamma[0] * kx1, zoh.gamma[0] * kx2},
      {zoh.phi[1][0] + zoh.gamma[1] * kx0, zoh.phi[1][1] + zoh.gamma[1] * kx1, zoh.gamma[1] * kx2},
      {-period, 0.0, 1.0}};
  const double trace = a[0][0] + a[1][1] + a[2][2];
  const double minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] -
                        a[0][2] * a[2][0] + a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  return solve_cubic(1.0, -trace, minors, -det);
}

double spectral_radius(const Roots3& z) {
  double r = 0.0;
  for (const auto& v : z) r = std::max(r, std::abs(v));
  return r;
}

namespace {

// Doubles `start` until `is_stable` fails, then bisects the crossing.
template <class IsStable>
double boundary_by_expansion(double start, IsStable&& is_stable, const char* what) {
  double lo = 0.0;
  double hi = start;
  int guard = 0;
  while (is_stable(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 80) {
      throw Error(ErrorKind::no_convergence,
                  fmt::format("no {} stability boundary found", what));
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-10 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (is_stable(mid)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TuningReport tune_gains(const FreeGeometry& geom, const LumpedParams& params, double period) {
  const double m = dynamics::moment_per_pressure(geom);
  const double sgn = m > 0.0 ? 1.0 : -1.0;
  // Scale guesses by the gain that doubles the plant stiffness.
  const double stiffness_gain = params.torsional_stiffness / std::abs(m);

  TuningReport report;
  report.integral_boundary = boundary_by_expansion(
      stiffness_gain,
      [&](double k) {
        const PidGains g{0.0, sgn * k, 0.0};
        return characteristic_roots(closed_loop_coefficients(g, geom, params)).stable;
      },
      "integral");
  const double ki = 0.5 * report.integral_boundary;

  auto sampled_stable = [&](const PidGains& g) {
    return spectral_radius(sampled_loop_poles(g, period, geom, params)) < 1.0;
  };
  if (!sampled_stable(PidGains{0.0, sgn * ki, 0.0})) {
    throw Error(ErrorKind::no_convergence,
                "integral gain unstable at this control rate; raise the control rate");
  }
  report.derivative_boundary = boundary_by_expansion(
      params.end_cap_inertia / (std::abs(m) * period),
      [&](double k) { return sampled_stable(PidGains{0.0, sgn * ki, sgn * k}); }, "derivative");
  const double kd = 0.5 * report.derivative_boundary;

  report.proportional_boundary = boundary_by_expansion(
      0.1 * stiffness_gain,
      [&](double k) { return sampled_stable(PidGains{sgn * k, sgn * ki, sgn * kd}); },
      "proportional");
  const double kp = 0.5 * report.proportional_boundary;

  report.gains = PidGains{sgn * kp, sgn * ki, sgn * kd};
  return report;
}

// ---------------------------------------------------------------------------
// References

CubicTrajectory::CubicTrajectory(double start, double goal, double duration)
    : start_(start), goal_(goal), duration_(duration) {
  if (!(duration > 0.0)) throw Error(ErrorKind::invalid_argument, "t_f must be > 0");
}

ReferencePoint CubicTrajectory::operator()(double t) const {
  if (!(t >= 0.0 && t <= duration_)) {
    throw Error(ErrorKind::time_out_of_range,
                fmt::format("t = {} outside [0, {}]", t, duration_));
  }
  const double u = t / duration_;
  const double blend = u * u * (3.0 - 2.0 * u);
  const double blend_rate = 6.0 * u * (1.0 - u) / duration_;
  return {start_ * (1.0 - blend) + goal_ * blend, (goal_ - start_) * blend_rate};
}

ReferenceSignal::ReferenceSignal(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error(ErrorKind::invalid_argument, "reference has no segments");
  for (const auto& s : segments_) {
    if (!(s.duration > 0.0)) throw Error(ErrorKind::invalid_argument, "segment durations must be > 0");
    if (!(s.ramp >= 0.0 && s.ramp <= s.duration)) {
      throw Error(ErrorKind::invalid_argument, "segment ramp must lie in [0, duration]");
    }
  }
}

ReferenceSignal ReferenceSignal::steps(std::span<const Hold> holds, bool incremental) {
  std::vector<Segment> segs;
  double target = 0.0;
  for (const auto& h : holds) {
    target = incremental ? target + h.angle : h.angle;
    segs.push_back({h.duration, target, 0.0});
  }
  return ReferenceSignal(std::move(segs));
}

ReferenceSignal ReferenceSignal::trajectory(std::span<const Hold> holds, double ramp) {
  std::vector<Segment> segs;
  for (const auto& h : holds) segs.push_back({h.duration, h.angle, std::min(ramp, h.duration)});
  return ReferenceSignal(std::move(segs));
}

ReferencePoint ReferenceSignal::operator()(double t) const {
  double start_time = 0.0;
  double previous = 0.0;
  for (const auto& seg : segments_) {
    const double end = start_time + seg.duration;
    if (t < end) {
      const double tau = std::max(0.0, t - start_time);
      if (seg.ramp > 0.0 && tau <= seg.ramp) {
        return CubicTrajectory(previous, seg.target, seg.ramp)(tau);
      }
      return {seg.target, 0.0};
    }
    previous = seg.target;
    start_time = end;
  }
  return {segments_.back().target, 0.0};
}

double ReferenceSignal::duration() const {
  double d = 0.0;
  for (const auto& s : segments_) d += s.duration;
  return d;
}

std::vector<double> ReferenceSignal::switch_times() const {
  std::vector<double> out;
  double t = 0.0;
  for (const auto& s : segments_) {
    out.push_back(t);
    t += s.duration;
  }
  return out;
}

ReferenceSignal step_scenario() {
  constexpr double deg = std::numbers::pi / 180.0;
  const std::array<ReferenceSignal::Hold, 3> holds{{{3.0, 50 * deg}, {3.0, -30 * deg}, {3.0, 60 * deg}}};
  return ReferenceSignal::steps(holds, true);
}

ReferenceSignal trajectory_scenario() {
  constexpr double deg = std::numbers::pi / 180.0;
  const std::array<ReferenceSignal::Hold, 3> holds{{{3.0, 40 * deg}, {3.0, 10 * deg}, {3.0, 70 * deg}}};
  return ReferenceSignal::trajectory(holds, 2.0);
}

// ---------------------------------------------------------------------------
// Closed loop

std::vector<ClosedLoopSample> closed_loop_sim(const FreeGeometry& geom,
                                              const LumpedParams& params,
                                              const PidGains& gains,
                                              const ReferenceSignal& reference,
                                              const ClosedLoopOptions& options) {
  if (!(options.control_rate > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "control rate must be > 0");
  }
  if (!(options.dt > 0.0)) throw Error(ErrorKind::invalid_argument, "dt must be > 0");
  const double period = 1.0 / options.control_rate;
  const double ratio = period / options.dt;
  const auto substeps = static_cast<long long>(std::llround(ratio));
  if (substeps < 1 || std::abs(ratio - static_cast<double>(substeps)) > 1e-6 * ratio) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("control period {} s is not a multiple of dt {} s", period, options.dt));
  }
  const double t_end = options.t_end > 0.0 ? options.t_end : reference.duration();
  const auto steps = static_cast<long long>(std::llround(t_end / options.dt));

  PidController controller(gains, options.bounds);
  dynamics::DynamicState x;
  double pressure = 0.0;
  std::vector<ClosedLoopSample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (long long i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * options.dt;
    const double phi_d = reference(t).angle;
    if (i % substeps == 0) pressure = controller.update(phi_d, x.phi, x.phi_dot, period);
    out.push_back({t, phi_d, x.phi, x.phi_dot, x.s, pressure});
    if (i == steps) break;
    x = dynamics::step_plant(options.plant, x, pressure, options.dt, geom, params, options.load);
    if (!std::isfinite(x.s) || !std::isfinite(x.phi) || !std::isfinite(x.s_dot) ||
        !std::isfinite(x.phi_dot)) {
      throw Error(ErrorKind::step_failure,
                  fmt::format("non-finite closed-loop state at t = {:.9g} s", t + options.dt));
    }
  }
  return out;
}

double rmsd(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("rmsd: series lengths differ ({} vs {})", a.size(), b.size()));
  }
  if (a.empty()) throw Error(ErrorKind::insufficient_data, "rmsd: empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

std::vector<double> resample(std::span<const double> t, std::span<const double> y,
                             std::span<const double> grid) {
  if (t.size() != y.size() || t.empty()) {
    throw Error(ErrorKind::invalid_argument, "resample: mismatched or empty series");
  }
  std::vector<double> out;
  out.reserve(grid.size());
  std::size_t k = 0;
  for (const double g : grid) {
    if (g <= t.front()) {
      out.push_back(y.front());
      continue;
    }
    if (g >= t.back()) {
      out.push_back(y.back());
      continue;
    }
    while (k + 1 < t.size() && t[k + 1] < g) ++k;
    const double w = (g - t[k]) / (t[k + 1] - t[k]);
    out.push_back(y[k] + w * (y[k + 1] - y[k]));
  }
  return out;
}

}  // namespace freelab::control
