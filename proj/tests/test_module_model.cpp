#include <cmath>
#include <numbers>

#include "freelab/module_model.hpp"
#include "freelab/units.hpp"
#include "support.hpp"

using namespace freelab;
using namespace freelab::module_model;
using units::deg_to_rad;
using units::psi_to_pa;

namespace {

const ModuleGeometry& m30() {
  static const auto m = lr_module(deg_to_rad(30));
  return m;
}
const ModuleGeometry& m60() {
  static const auto m = lr_module(deg_to_rad(60));
  return m;
}

// Feasible pressures below each module's fold.
double low_p(const ModuleGeometry& m) {
  return m.actuators[0].winding_angle < deg_to_rad(45) ? psi_to_pa(0.1) : psi_to_pa(1.0);
}

int active_count(const ActuationPattern& p) {
  int n = 0;
  for (bool a : p.active) n += a;
  return n;
}

}  // namespace

TEST(Patterns, CountsAndOrdering) {
  const std::array<int, 5> counts{1, 2, 4, 4, 4};
  const std::array<int, 5> active{4, 2, 1, 2, 3};
  std::size_t total = 0;
  for (int c = 1; c <= 5; ++c) {
    const auto v = enumerate_patterns(c, 100.0);
    EXPECT_EQ(static_cast<int>(v.size()), counts[c - 1]);
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_EQ(v[i].case_id, c);
      EXPECT_EQ(v[i].variation, static_cast<int>(i));
      EXPECT_EQ(active_count(v[i]), active[c - 1]);
      for (int k = 0; k < 4; ++k) EXPECT_EQ(v[i].pressure[k], v[i].active[k] ? 100.0 : 0.0);
    }
    total += v.size();
  }
  EXPECT_EQ(total, 15u);
  EXPECT_EQ(enumerate_all().size(), 15u);
  EXPECT_FREELAB_ERROR(enumerate_patterns(6), invalid_argument);
}

TEST(Patterns, DiagonalAndAdjacentPairs) {
  for (const auto& p : enumerate_patterns(2)) EXPECT_EQ(p.active[0], p.active[2]);
  for (const auto& p : enumerate_patterns(4)) {
    EXPECT_NE(p.active[0], p.active[2]);
    EXPECT_NE(p.active[1], p.active[3]);
  }
}

TEST(Patterns, QuarterRotationCyclesVariations) {
  for (int c = 2; c <= 5; ++c) {
    for (const auto& p : enumerate_patterns(c)) {
      auto r = p;
      for (int k = 0; k < 4; ++k) r = rotate_quarter(r);
      EXPECT_EQ(r.active, p.active);
      EXPECT_EQ(r.variation, p.variation);
    }
  }
  const auto v3 = enumerate_patterns(3);
  EXPECT_EQ(rotate_quarter(v3[1]).variation, 2);
}

TEST(Module, Geometry) {
  EXPECT_NO_THROW(m30().validate());
  auto bad = m30();
  bad.actuators[2] = bad.actuators[1];
  EXPECT_FREELAB_ERROR(bad.validate(), invalid_argument);
  const double c = 0.015 / std::sqrt(2.0);
  EXPECT_EQ(m30().corner(0)[0], c);
  EXPECT_EQ(m30().corner(2)[1], -c);
}

TEST(Actuator, Responses) {
  const auto& a30 = m30().actuators[0];
  const auto zero = actuator_response(a30, m30().params, 0.0);
  EXPECT_EQ(zero.length, a30.length);
  EXPECT_EQ(zero.twist, 0.0);
  EXPECT_LT(actuator_response(a30, m30().params, low_p(m30())).length, a30.length);
  const auto& a60 = m60().actuators[0];
  EXPECT_GT(actuator_response(a60, m60().params, low_p(m60())).length, a60.length);
}

TEST(Pose, ZeroPatternIsIdentity) {
  for (const auto* m : {&m30(), &m60()}) {
    const auto pose = module_pose(*m, enumerate_patterns(1, 0.0)[0]);
    EXPECT_EQ(pose.x, 0.0);
    EXPECT_EQ(pose.y, 0.0);
    EXPECT_EQ(pose.z, 0.0);
    EXPECT_EQ(pose.twist, 0.0);
  }
}

TEST(Pose, CaseOnePureAxial) {
  for (const auto* m : {&m30(), &m60()}) {
    for (double f : {0.25, 0.5, 1.0}) {
      const auto pose = module_pose(*m, enumerate_patterns(1, f * low_p(*m))[0]);
      const double L = m->rest_length();
      EXPECT_LT(std::abs(pose.x), 1e-9 * L);
      EXPECT_LT(std::abs(pose.y), 1e-9 * L);
      EXPECT_LT(std::abs(pose.twist), 1e-9);
    }
  }
  EXPECT_LT(module_pose(m30(), enumerate_patterns(1, low_p(m30()))[0]).z, 0.0);
  EXPECT_GT(module_pose(m60(), enumerate_patterns(1, low_p(m60()))[0]).z, 0.0);
}

TEST(Pose, CaseTwoTwistsWithoutBending) {
  for (const auto* m : {&m30(), &m60()}) {
    const auto v = enumerate_patterns(2, low_p(*m));
    const auto a = module_pose(*m, v[0]);
    const auto b = module_pose(*m, v[1]);
    const double L = m->rest_length();
    EXPECT_GT(std::abs(a.twist), 1e-3);
    EXPECT_LT(std::hypot(a.x, a.y), 1e-9 * L);
    // Swapping diagonals mirrors the twist.
    EXPECT_NEAR(b.twist, -a.twist, 1e-9 * std::abs(a.twist));
    EXPECT_NEAR(b.z, a.z, 1e-12);
  }
}

TEST(Pose, CaseFourBendsInSymmetryPlane) {
  for (const auto* m : {&m30(), &m60()}) {
    const double L = m->rest_length();
    const auto v = enumerate_patterns(4, low_p(*m));
    // 1100 and 0011 bend in the y-z plane, 0110 and 1001 in x-z.
    EXPECT_LT(std::abs(module_pose(*m, v[0]).x), 1e-9 * L);
    EXPECT_LT(std::abs(module_pose(*m, v[2]).x), 1e-9 * L);
    EXPECT_LT(std::abs(module_pose(*m, v[1]).y), 1e-9 * L);
    EXPECT_LT(std::abs(module_pose(*m, v[3]).y), 1e-9 * L);
    EXPECT_GT(std::abs(module_pose(*m, v[0]).y), 1e-6);
  }
}

TEST(Pose, QuarterRotationEquivariance) {
  for (const auto* m : {&m30(), &m60()}) {
    const double L = m->rest_length();
    for (int c = 1; c <= 5; ++c) {
      for (const auto& p : enumerate_patterns(c, low_p(*m))) {
        const auto a = module_pose(*m, p);
        const auto b = module_pose(*m, rotate_quarter(p));
        EXPECT_NEAR(b.x, -a.y, 1e-9 * L);
        EXPECT_NEAR(b.y, a.x, 1e-9 * L);
        EXPECT_NEAR(b.z, a.z, 1e-9 * L);
        EXPECT_NEAR(std::abs(b.twist), std::abs(a.twist), 1e-9);
        if (std::hypot(a.x, a.y) > 1e-9 * L) {
          const double turned = std::remainder(b.azimuth - a.azimuth - std::numbers::pi / 2,
                                               2 * std::numbers::pi);
          EXPECT_NEAR(turned, 0.0, 1e-9);
        }
      }
    }
  }
}

TEST(Pose, ContinuousInPressure) {
  const auto& m = m30();
  const auto base = enumerate_patterns(3)[0];
  EndEffectorPose prev{};
  for (int i = 1; i <= 20; ++i) {
    auto p = base;
    p.pressure[0] = low_p(m) * i / 20.0;
    const auto pose = module_pose(m, p);
    EXPECT_LT(std::hypot(pose.x - prev.x, pose.y - prev.y, pose.z - prev.z), 2e-3);
    prev = pose;
  }
}

TEST(Pose, ErrorNamesActuator) {
  auto p = enumerate_patterns(3)[2];
  p.pressure[2] = psi_to_pa(7.0);
  try {
    module_pose(m30(), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_convergence);
    EXPECT_NE(std::string(e.what()).find("actuator 2"), std::string::npos) << e.what();
  }
}

TEST(Workspace, ZeroGridIsOrigin) {
  const std::vector<int> cases{1, 2, 3, 4, 5};
  const std::vector<double> grid{0.0};
  const auto ws = workspace(m30(), cases, grid);
  ASSERT_EQ(ws.points.size(), 1u);
  EXPECT_EQ(ws.paths.size(), 15u);
  for (const auto& p : ws.paths) EXPECT_EQ(p.points, std::vector<std::size_t>{0});
  EXPECT_TRUE(ws.failures.empty());
}

TEST(Workspace, PathsStartAtOriginAndRotate) {
  const std::vector<int> cases{3, 4, 5};
  std::vector<double> grid;
  for (int i = 0; i <= 5; ++i) grid.push_back(low_p(m60()) * i / 5.0);
  const auto ws = workspace(m60(), cases, grid);
  EXPECT_TRUE(ws.failures.empty());
  EXPECT_FALSE(ws.boundary.empty());
  for (const auto& path : ws.paths) {
    ASSERT_EQ(path.points.size(), grid.size());
    EXPECT_EQ(path.points.front(), 0u);
  }
  // Case 3 variation v+1 is variation v turned by 90 degrees.
  const double L = m60().rest_length();
  for (int v = 0; v < 4; ++v) {
    const auto& a = ws.paths[v];
    const auto& b = ws.paths[(v + 1) % 4];
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& pa = ws.points[a.points[k]].pose;
      const auto& pb = ws.points[b.points[k]].pose;
      EXPECT_NEAR(pb.x, -pa.y, 1e-9 * L);
      EXPECT_NEAR(pb.y, pa.x, 1e-9 * L);
    }
  }
  for (const auto& tri : ws.boundary) {
    for (auto i : tri) EXPECT_LT(i, ws.points.size());
  }
}

TEST(Workspace, FailuresAreRecorded) {
  const std::vector<int> cases{1};
  const std::vector<double> grid{0.0, psi_to_pa(0.1), psi_to_pa(7.0)};
  const auto ws = workspace(m30(), cases, grid);
  EXPECT_EQ(ws.points.size(), 2u);
  ASSERT_EQ(ws.failures.size(), 1u);
  EXPECT_EQ(ws.failures[0].pressure, psi_to_pa(7.0));
  EXPECT_NE(ws.failures[0].reason.find("NoConvergence"), std::string::npos);
}

TEST(Stir, PhaseStaggeredBand) {
  const auto p = stir_pattern(psi_to_pa(2), psi_to_pa(10), 4.0, 0.0);
  EXPECT_NEAR(p.pressure[0], psi_to_pa(10), 1e-9);
  EXPECT_NEAR(p.pressure[2], psi_to_pa(2), 1e-9);
  EXPECT_NEAR(p.pressure[1], psi_to_pa(6), 1e-9);
  EXPECT_NEAR(p.pressure[3], psi_to_pa(6), 1e-9);
  EXPECT_EQ(p.case_id, 0);
  for (double t : {0.3, 1.7, 2.9}) {
    const auto a = stir_pattern(100, 900, 4.0, t);
    const auto b = stir_pattern(100, 900, 4.0, t + 4.0);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(a.pressure[i], b.pressure[i], 1e-9);
  }
}

TEST(Stir, TipPathCloses) {
  // Band scaled below the 60 deg module's fold.
  const double lo = psi_to_pa(0.2);
  const double hi = psi_to_pa(1.0);
  const auto start = module_pose(m60(), stir_pattern(lo, hi, 1.0, 0.0));
  double reach = 0.0;
  EndEffectorPose last{};
  for (int i = 1; i <= 16; ++i) {
    last = module_pose(m60(), stir_pattern(lo, hi, 1.0, i / 16.0));
    reach = std::max(reach, std::hypot(last.x - start.x, last.y - start.y));
  }
  EXPECT_GT(reach, 1e-4);
  EXPECT_LT(std::hypot(last.x - start.x, last.y - start.y, last.z - start.z), 1e-9);
}
