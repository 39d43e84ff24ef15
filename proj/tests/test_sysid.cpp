#include <cmath>
#include <numbers>
#include <random>

#include "freelab/dynamics.hpp"
#include "freelab/sysid.hpp"
#include "freelab/units.hpp"
#include "support.hpp"

using namespace freelab;
using namespace freelab::sysid;
using testing_support::rel_err;

namespace {

VibrationTrace closed_form(double zeta, double wn, double t_end, double dt) {
  VibrationTrace tr;
  const double wd = wn * std::sqrt(1.0 - zeta * zeta);
  for (int i = 0; i * dt <= t_end; ++i) {
    const double t = i * dt;
    tr.t.push_back(t);
    tr.displacement.push_back(std::exp(-zeta * wn * t) *
                              (std::cos(wd * t) + zeta * wn / wd * std::sin(wd * t)));
  }
  return tr;
}

}  // namespace

TEST(Stiffness, ExactSlope) {
  std::vector<StaticLoadSample> s;
  for (int i = 1; i <= 5; ++i) s.push_back({175.0 * 1e-3 * i, 1e-3 * i, Axis::axial});
  const auto fit = fit_stiffness(s);
  EXPECT_LT(rel_err(fit.stiffness, 175.0), 1e-15);
  EXPECT_LT(fit.rms_residual, 1e-13);
}

TEST(Stiffness, NormalEquationOracle) {
  std::mt19937 rng(2);
  std::normal_distribution<double> noise(0.0, 1e-5);
  std::vector<StaticLoadSample> s;
  double sxy = 0.0;
  double sxx = 0.0;
  for (int i = -10; i <= 10; ++i) {
    const double x = 0.02 * i;
    const double y = 1.56e-3 * x + noise(rng);
    s.push_back({y, x, Axis::torsional});
    sxy += x * y;
    sxx += x * x;
  }
  EXPECT_LT(rel_err(fit_stiffness(s).stiffness, sxy / sxx), 1e-12);
}

TEST(Stiffness, Errors) {
  const std::vector<StaticLoadSample> one{{1.0, 1.0, Axis::axial}};
  EXPECT_FREELAB_ERROR(fit_stiffness(one), insufficient_data);
  const std::vector<StaticLoadSample> flat{{1.0, 0.0, Axis::axial}, {2.0, 0.0, Axis::axial}};
  EXPECT_FREELAB_ERROR(fit_stiffness(flat), zero_displacement_range);
  const std::vector<StaticLoadSample> mixed{{1.0, 1.0, Axis::axial}, {2.0, 2.0, Axis::torsional}};
  EXPECT_FREELAB_ERROR(fit_stiffness(mixed), invalid_argument);
}

TEST(Stiffness, ScaleEquivariance) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<StaticLoadSample> s;
  for (int i = 0; i < 12; ++i) s.push_back({d(rng), d(rng), Axis::axial});
  const double k = fit_stiffness(s).stiffness;
  for (double a : {0.1, 3.0, 250.0}) {
    auto loads = s;
    auto disp = s;
    for (auto& x : loads) x.load *= a;
    for (auto& x : disp) x.displacement *= a;
    EXPECT_LT(rel_err(fit_stiffness(loads).stiffness, a * k), 1e-13);
    EXPECT_LT(rel_err(fit_stiffness(disp).stiffness, k / a), 1e-13);
  }
}

TEST(Damping, ClosedFormTenPercent) {
  const double wn = 2.0 * std::numbers::pi * 5.0;
  const auto tr = closed_form(0.1, wn, 2.0, 1e-3);
  const auto fit = fit_damping(tr, 100.0, 0.1);
  EXPECT_LT(std::abs(fit.damping_ratio - 0.1) / 0.1, 0.01);
  EXPECT_LT(rel_err(fit.damping, 2.0 * fit.damping_ratio * std::sqrt(100.0 * 0.1)), 1e-15);
  EXPECT_GE(fit.peaks, 2);
}

TEST(Damping, RecoversRangeOfRatios) {
  for (double z : {0.02, 0.05, 0.2, 0.3}) {
    const auto fit = fit_damping(closed_form(z, 40.0, 3.0, 5e-4), 1.0, 1.0);
    EXPECT_LT(std::abs(fit.damping_ratio - z) / z, 0.01) << z;
  }
}

TEST(Damping, UndampedGivesZero) {
  const auto fit = fit_damping(closed_form(0.0, 30.0, 2.0, 1e-3), 1.0, 1.0);
  EXPECT_LT(fit.log_decrement, 1e-5);
  EXPECT_LT(fit.damping, 1e-5);
  EXPECT_GE(fit.damping, 0.0);
}

TEST(Damping, Errors) {
  VibrationTrace decay;
  for (int i = 0; i < 100; ++i) {
    decay.t.push_back(0.01 * i);
    decay.displacement.push_back(std::exp(-0.05 * i));
  }
  EXPECT_FREELAB_ERROR(fit_damping(decay, 1.0, 1.0), not_underdamped);

  VibrationTrace one = decay;
  for (int i = 0; i < 100; ++i) one.displacement[i] = std::sin(std::numbers::pi * i / 99.0);
  EXPECT_FREELAB_ERROR(fit_damping(one, 1.0, 1.0), insufficient_peaks);

  VibrationTrace growing = closed_form(0.05, 20.0, 2.0, 1e-3);
  for (std::size_t i = 0; i < growing.t.size(); ++i) {
    growing.displacement[i] *= std::exp(2.0 * growing.t[i]);
  }
  EXPECT_FREELAB_ERROR(fit_damping(growing, 1.0, 1.0), not_underdamped);
}

TEST(Damping, DynamicsRoundTrip) {
  const auto g = kinematics::canonical_geometry(units::deg_to_rad(40));
  const auto p = dynamics::default_lumped_params(g);
  dynamics::DynamicState x0;
  x0.s = 1e-3;
  x0.phi = 0.05;
  const auto series =
      dynamics::integrate(dynamics::PlantModel::nonlinear, x0,
                          dynamics::PressureSignal::constant(0.0, {0.0, 1.0}), {0.5, 1e-4}, g, p);
  VibrationTrace axial{{}, {}, Axis::axial};
  VibrationTrace torsion{{}, {}, Axis::torsional};
  for (const auto& s : series) {
    axial.t.push_back(s.t);
    axial.displacement.push_back(s.state.s);
    torsion.t.push_back(s.t);
    torsion.displacement.push_back(s.state.phi);
  }
  const auto fa = fit_damping(axial, p.axial_stiffness, p.end_cap_mass);
  const auto ft = fit_damping(torsion, p.torsional_stiffness, p.end_cap_inertia);
  EXPECT_LT(rel_err(fa.damping, p.axial_damping), 0.02);
  EXPECT_LT(rel_err(ft.damping, p.torsional_damping), 0.02);
}
