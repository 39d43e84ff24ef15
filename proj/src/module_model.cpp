#include "freelab/module_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <utility>
#include <variant>

#include <fmt/format.h>

#include "freelab/error.hpp"
#include "freelab/units.hpp"

namespace freelab::module_model {

using kinematics::Handedness;

namespace {

using Mask = std::array<bool, 4>;

const std::vector<Mask>& case_masks(int case_id) {
  static const std::array<std::vector<Mask>, 5> masks{{
      {{true, true, true, true}},
      {{true, false, true, false}, {false, true, false, true}},
      {{true, false, false, false},
       {false, true, false, false},
       {false, false, true, false},
       {false, false, false, true}},
      {{true, true, false, false},
       {false, true, true, false},
       {false, false, true, true},
       {true, false, false, true}},
      {{false, true, true, true},
       {true, false, true, true},
       {true, true, false, true},
       {true, true, true, false}},
  }};
  if (case_id < 1 || case_id > 5) {
    throw Error(ErrorKind::invalid_argument, fmt::format("actuation case {} not in 1..5", case_id));
  }
  return masks[static_cast<std::size_t>(case_id - 1)];
}

bool same_geometry(const FreeGeometry& a, const FreeGeometry& b) {
  return a.length == b.length && a.outer_radius == b.outer_radius &&
         a.inner_radius == b.inner_radius && a.wall == b.wall &&
         a.winding_angle == b.winding_angle && a.handedness == b.handedness &&
         a.n_fibers == b.n_fibers;
}

}  // namespace

void ModuleGeometry::validate() const {
  if (!(half_diagonal > 0.0)) throw Error(ErrorKind::invalid_argument, "half_diagonal must be > 0");
  for (const auto& a : actuators) a.validate();
  params.validate();
  if (actuators[0].handedness != actuators[2].handedness ||
      actuators[1].handedness != actuators[3].handedness ||
      actuators[0].handedness == actuators[1].handedness) {
    throw Error(ErrorKind::invalid_argument,
                "diagonal actuators must share handedness and neighbours must differ");
  }
}

std::array<double, 2> ModuleGeometry::corner(std::size_t i) const {
  const double c = half_diagonal / std::numbers::sqrt2;
  static constexpr std::array<std::array<double, 2>, 4> signs{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
  return {signs.at(i)[0] * c, signs.at(i)[1] * c};
}

ModuleGeometry lr_module(double winding_angle, double half_diagonal) {
  ModuleGeometry m;
  const auto right = kinematics::canonical_geometry(winding_angle, Handedness::right);
  const auto left = right.with_handedness(Handedness::left);
  m.actuators = {right, left, right, left};
  m.half_diagonal = half_diagonal;
  m.params = dynamics::default_lumped_params(right);
  m.validate();
  return m;
}

std::vector<ActuationPattern> enumerate_patterns(int case_id, double pressure) {
  const auto& masks = case_masks(case_id);
  std::vector<ActuationPattern> out;
  for (std::size_t v = 0; v < masks.size(); ++v) {
    ActuationPattern p;
    p.case_id = case_id;
    p.variation = static_cast<int>(v);
    p.active = masks[v];
    for (std::size_t i = 0; i < 4; ++i) p.pressure[i] = masks[v][i] ? pressure : 0.0;
    out.push_back(p);
  }
  return out;
}

std::vector<ActuationPattern> enumerate_all(double pressure) {
  std::vector<ActuationPattern> out;
  for (int c = 1; c <= 5; ++c) {
    auto v = enumerate_patterns(c, pressure);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

ActuationPattern rotate_quarter(const ActuationPattern& p) {
  ActuationPattern r = p;
  for (std::size_t i = 0; i < 4; ++i) {
    r.active[(i + 1) % 4] = p.active[i];
    r.pressure[(i + 1) % 4] = p.pressure[i];
  }
  if (p.case_id >= 1 && p.case_id <= 5) {
    const auto& masks = case_masks(p.case_id);
    const auto it = std::find(masks.begin(), masks.end(), r.active);
    r.variation = static_cast<int>(it - masks.begin());
  }
  return r;
}

ActuatorResponse actuator_response(const FreeGeometry& geom, const LumpedParams& params,
                                   double pressure) {
  const auto eq = dynamics::static_equilibrium(pressure, geom, params);
  return {geom.length + eq.s, eq.phi};
}

EndEffectorPose pose_from_responses(const ModuleGeometry& module,
                                    const std::array<ActuatorResponse, 4>& responses) {
  // Least-squares plane z = a + gx x + gy y through the four tips; the
  // corner coordinates are symmetric so the normal equations decouple.
  double sxx = 0.0;
  double syy = 0.0;
  double sxl = 0.0;
  double syl = 0.0;
  double mean_length = 0.0;
  double twist = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto xy = module.corner(i);
    sxx += xy[0] * xy[0];
    syy += xy[1] * xy[1];
    sxl += xy[0] * responses[i].length;
    syl += xy[1] * responses[i].length;
    mean_length += responses[i].length;
    twist += responses[i].twist;
  }
  mean_length *= 0.25;
  const double gx = sxl / sxx;
  const double gy = syl / syy;
  const double slope = std::hypot(gx, gy);

  EndEffectorPose pose;
  pose.twist = 0.25 * twist;
  pose.tilt = std::atan(slope);
  // sin(t)/t and (1 - cos t)/t, with series near zero.
  const double t = pose.tilt;
  const double axial = t < 1e-4 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  const double lateral = t < 1e-4 ? t / 2.0 - t * t * t / 24.0 : (1.0 - std::cos(t)) / t;
  pose.z = mean_length * axial - module.rest_length();
  if (slope > 0.0) {
    // The tip bends toward the shorter side, against the gradient.
    const double ux = -gx / slope;
    const double uy = -gy / slope;
    pose.x = mean_length * lateral * ux;
    pose.y = mean_length * lateral * uy;
    pose.azimuth = std::atan2(uy, ux);
  }
  return pose;
}

EndEffectorPose module_pose(const ModuleGeometry& module, const ActuationPattern& pattern) {
  std::array<ActuatorResponse, 4> responses;
  for (std::size_t i = 0; i < 4; ++i) {
    try {
      responses[i] = actuator_response(module.actuators[i], module.params, pattern.pressure[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("actuator {}: {}", i, e.what()));
    }
  }
  return pose_from_responses(module, responses);
}

std::vector<double> default_pressure_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 15; ++i) grid.push_back(units::psi_to_pa(7.0 * i / 14.0));
  return grid;
}

namespace {

// Responses keyed by actuator geometry and pressure; equal geometries share
// one solve.
class ResponseCache {
 public:
  explicit ResponseCache(const ModuleGeometry& m) : module_(m) {
    for (std::size_t i = 0; i < 4; ++i) {
      class_of_[i] = i;
      for (std::size_t j = 0; j < i; ++j) {
        if (same_geometry(m.actuators[i], m.actuators[j])) {
          class_of_[i] = class_of_[j];
          break;
        }
      }
    }
  }

  EndEffectorPose pose(const ActuationPattern& pattern) {
    std::array<ActuatorResponse, 4> responses;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& entry = lookup(i, pattern.pressure[i]);
      if (const auto* err = std::get_if<Error>(&entry)) {
        throw Error(err->kind(), fmt::format("actuator {}: {}", i, err->what()));
      }
      responses[i] = std::get<ActuatorResponse>(entry);
    }
    return pose_from_responses(module_, responses);
  }

 private:
  using Entry = std::variant<ActuatorResponse, Error>;

  const Entry& lookup(std::size_t i, double pressure) {
    const auto key = std::make_pair(class_of_[i], pressure);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      Entry entry{ActuatorResponse{}};
      try {
        entry = actuator_response(module_.actuators[i], module_.params, pressure);
      } catch (const Error& e) {
        entry = e;
      }
      it = cache_.emplace(key, std::move(entry)).first;
    }
    return it->second;
  }

  const ModuleGeometry& module_;
  std::array<std::size_t, 4> class_of_{};
  std::map<std::pair<std::size_t, double>, Entry> cache_;
};

}  // namespace

Workspace workspace(const ModuleGeometry& module, std::span<const int> cases,
                    std::span<const double> pressures) {
  module.validate();
  for (const double p : pressures) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorKind::invalid_argument, fmt::format("grid pressure {} Pa is invalid", p));
    }
  }
  ResponseCache cache(module);
  Workspace ws;
  std::optional<std::size_t> origin;

  for (const int case_id : cases) {
    for (const auto& base : enumerate_patterns(case_id)) {
      WorkspacePath path{case_id, base.variation, {}, {}};
      for (std::size_t k = 0; k < pressures.size(); ++k) {
        const double p = pressures[k];
        if (p == 0.0) {
          if (!origin) {
            origin = ws.points.size();
            ws.points.push_back({0, 0, 0.0, EndEffectorPose{}});
          }
          path.points.push_back(*origin);
          path.levels.push_back(k);
          continue;
        }
        ActuationPattern pattern = base;
        for (std::size_t i = 0; i < 4; ++i) pattern.pressure[i] = base.active[i] ? p : 0.0;
        try {
          const auto pose = cache.pose(pattern);
          path.points.push_back(ws.points.size());
          path.levels.push_back(k);
          ws.points.push_back({case_id, base.variation, p, pose});
        } catch (const Error& e) {
          ws.failures.push_back({case_id, base.variation, p,
                                 fmt::format("{}: {}", to_string(e.kind()), e.what())});
        }
      }
      ws.paths.push_back(std::move(path));
    }
  }

  // Boundary: bending paths sorted by the azimuth of their last point.
  std::vector<const WorkspacePath*> rim;
  for (const auto& path : ws.paths) {
    if (path.case_id >= 3 && path.points.size() >= 2) rim.push_back(&path);
  }
  auto azimuth = [&](const WorkspacePath* p) { return ws.points[p->points.back()].pose.azimuth; };
  std::stable_sort(rim.begin(), rim.end(),
                   [&](const auto* a, const auto* b) { return azimuth(a) < azimuth(b); });
  if (rim.size() >= 2) {
    auto at_level = [](const WorkspacePath& p, std::size_t level) -> std::optional<std::size_t> {
      for (std::size_t j = 0; j < p.levels.size(); ++j) {
        if (p.levels[j] == level) return p.points[j];
      }
      return std::nullopt;
    };
    for (std::size_t n = 0; n < rim.size(); ++n) {
      const auto& a = *rim[n];
      const auto& b = *rim[(n + 1) % rim.size()];
      for (std::size_t k = 0; k + 1 < pressures.size(); ++k) {
        const auto a0 = at_level(a, k);
        const auto a1 = at_level(a, k + 1);
        const auto b0 = at_level(b, k);
        const auto b1 = at_level(b, k + 1);
        if (!a0 || !a1 || !b0 || !b1) continue;
        if (*a0 != *a1 && *a1 != *b1 && *a0 != *b1) ws.boundary.push_back({*a0, *a1, *b1});
        if (*a0 != *b1 && *b1 != *b0 && *a0 != *b0) ws.boundary.push_back({*a0, *b1, *b0});
      }
    }
  }
  return ws;
}

ActuationPattern stir_pattern(double low, double high, double period, double t) {
  if (!(period > 0.0)) throw Error(ErrorKind::invalid_argument, "stir period must be > 0");
  if (!(low >= 0.0 && high >= low)) {
    throw Error(ErrorKind::invalid_argument, "stir band needs 0 <= low <= high");
  }
  const double mid = 0.5 * (low + high);
  const double amp = 0.5 * (high - low);
  ActuationPattern p;
  for (std::size_t i = 0; i < 4; ++i) {
    const double phase = 2.0 * std::numbers::pi * t / period - 0.5 * std::numbers::pi * static_cast<double>(i);
    p.pressure[i] = mid + amp * std::cos(phase);
    p.active[i] = p.pressure[i] > 0.0;
  }
  return p;
}

}  // namespace freelab::module_model
