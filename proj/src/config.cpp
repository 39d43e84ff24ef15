#include "freelab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "freelab/error.hpp"
#include "freelab/units.hpp"

namespace freelab::config {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorKind::config, message); }

// Object view that remembers which keys were read so leftovers can be
// reported as unknown.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(fmt::format("'{}' must be an object", path_));
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  std::optional<double> number(const std::string& key) {
    if (!take(key)) return std::nullopt;
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(fmt::format("'{}' must be a number", name(key)));
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(fmt::format("'{}' must be finite", name(key)));
    return d;
  }

  std::optional<bool> boolean(const std::string& key) {
    if (!take(key)) return std::nullopt;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail(fmt::format("'{}' must be true or false", name(key)));
    return v.get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    if (!take(key)) return std::nullopt;
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(fmt::format("'{}' must be a string", name(key)));
    return v.get<std::string>();
  }

  std::optional<Block> object(const std::string& key) {
    if (!take(key)) return std::nullopt;
    return Block(j_.at(key), name(key));
  }

  const json* array(const std::string& key) {
    if (!take(key)) return nullptr;
    const auto& v = j_.at(key);
    if (!v.is_array()) fail(fmt::format("'{}' must be an array", name(key)));
    return &v;
  }

  // A quantity given in exactly one of two units.
  std::optional<double> either(const std::string& a, double a_to_si, const std::string& b,
                               double b_to_si) {
    if (has(a) && has(b)) fail(fmt::format("give only one of '{}' and '{}'", name(a), name(b)));
    if (auto v = number(a)) return *v * a_to_si;
    if (auto v = number(b)) return *v * b_to_si;
    return std::nullopt;
  }

  std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) fail(fmt::format("unknown key '{}'", name(item.key())));
    }
  }

 private:
  bool take(const std::string& key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail(fmt::format("JSON parse error at byte {}: {}", e.byte, e.what()));
  }
}

template <class F>
void checked(const std::string& block, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    fail(fmt::format("invalid '{}' block: {}", block, e.what()));
  }
}

constexpr double mm = 1e-3;
constexpr double mpa = 1e6;

}  // namespace

WorkbenchConfig default_config() {
  WorkbenchConfig c;
  c.geometry = kinematics::canonical_geometry(units::deg_to_rad(40.0), kinematics::Handedness::left);
  c.params = dynamics::default_lumped_params(c.geometry);
  return c;
}

void WorkbenchConfig::validate() const {
  checked("free", [&] { geometry.validate(); });
  checked("lumped", [&] { params.validate(); });
  checked("pressure", [&] { bounds.validate(); });
  checked("material", [&] {
    switch (material.model) {
      case MaterialModel::ogden: material.ogden.validate(); break;
      case MaterialModel::neo_hookean: material.neo_hookean.validate(); break;
      case MaterialModel::linear: material.linear.validate(); break;
    }
  });
  if (!(integration.dt > 0.0)) fail("'integration.dt_s' must be > 0");
  if (!(integration.control_rate > 0.0)) fail("'integration.control_rate_hz' must be > 0");
  if (!(integration.t_end > 0.0)) fail("'integration.t_end_s' must be > 0");
  if (module) {
    if (!(module->half_diagonal > 0.0)) fail("'module.half_diagonal_mm' must be > 0");
    checked("module", [&] { geometry.with_winding_angle(module->winding_angle).validate(); });
  }
}

WorkbenchConfig parse_config(const std::string& json_text) {
  const json root_json = parse_json(json_text);
  Block root(root_json, "");
  WorkbenchConfig c = default_config();

  double youngs = dynamics::ElastomerModuli{}.youngs_modulus;
  if (auto free = root.object("free")) {
    auto& g = c.geometry;
    double length = g.length;
    double inner = g.inner_radius;
    double wall = g.wall;
    double gamma = g.winding_angle;
    auto hand = g.handedness;
    int fibers = g.n_fibers;
    if (auto v = free->number("length_mm")) length = *v * mm;
    if (auto v = free->number("inner_radius_mm")) inner = *v * mm;
    if (auto v = free->number("wall_mm")) wall = *v * mm;
    if (auto v = free->number("winding_angle_deg")) gamma = units::deg_to_rad(*v);
    if (auto v = free->string("handedness")) {
      if (*v == "left" || *v == "L") hand = kinematics::Handedness::left;
      else if (*v == "right" || *v == "R") hand = kinematics::Handedness::right;
      else fail(fmt::format("'free.handedness' must be left or right, got '{}'", *v));
    }
    if (auto v = free->number("n_fibers")) {
      if (*v != std::floor(*v)) fail("'free.n_fibers' must be an integer");
      fibers = static_cast<int>(*v);
    }
    free->finish();
    checked("free", [&] {
      g = kinematics::FreeGeometry::make(length, inner, wall, gamma, hand, fibers);
    });
  }

  if (auto mat = root.object("material")) {
    if (auto v = mat->string("model")) {
      if (*v == "ogden") c.material.model = MaterialModel::ogden;
      else if (*v == "neo_hookean") c.material.model = MaterialModel::neo_hookean;
      else if (*v == "linear") c.material.model = MaterialModel::linear;
      else fail(fmt::format("'material.model' must be ogden, neo_hookean or linear, got '{}'", *v));
    }
    if (auto v = mat->number("shear_modulus_mpa")) {
      c.material.ogden.mu = *v * mpa;
      c.material.neo_hookean.mu = *v * mpa;
    }
    if (auto v = mat->number("alpha")) c.material.ogden.alpha = *v;
    if (auto v = mat->number("youngs_modulus_mpa")) c.material.linear.youngs_modulus = *v * mpa;
    mat->finish();
  }

  double damping_ratio = 0.1;
  double end_cap_mass = 0.005;
  std::optional<Block> lumped = root.object("lumped");
  if (lumped) {
    if (auto v = lumped->number("youngs_modulus_mpa")) youngs = *v * mpa;
    if (auto v = lumped->number("damping_ratio")) damping_ratio = *v;
    if (auto v = lumped->number("end_cap_mass_g")) end_cap_mass = *v * 1e-3;
  }
  checked("lumped", [&] {
    c.recipe = {{youngs, youngs / 3.0}, damping_ratio, end_cap_mass};
    c.params = dynamics::default_lumped_params(c.geometry, c.recipe.moduli, damping_ratio,
                                               end_cap_mass);
  });
  if (lumped) {
    auto& p = c.params;
    if (auto v = lumped->number("axial_stiffness_n_per_m")) p.axial_stiffness = *v;
    if (auto v = lumped->number("torsional_stiffness_nm_per_rad")) p.torsional_stiffness = *v;
    if (auto v = lumped->number("axial_damping_ns_per_m")) p.axial_damping = *v;
    if (auto v = lumped->number("torsional_damping_nms_per_rad")) p.torsional_damping = *v;
    if (auto v = lumped->number("end_cap_inertia_kg_m2")) p.end_cap_inertia = *v;
    lumped->finish();
  }

  if (auto ctl = root.object("controller")) {
    const bool any_gain = ctl->has("kp_pa_per_rad") || ctl->has("ki_pa_per_rad_s") ||
                          ctl->has("kd_pa_s_per_rad");
    c.controller.auto_tune = ctl->boolean("auto_tune").value_or(!any_gain);
    if (auto v = ctl->number("kp_pa_per_rad")) c.controller.gains.proportional = *v;
    if (auto v = ctl->number("ki_pa_per_rad_s")) c.controller.gains.integral = *v;
    if (auto v = ctl->number("kd_pa_s_per_rad")) c.controller.gains.derivative = *v;
    if (c.controller.auto_tune && any_gain) {
      fail("'controller' sets gains and auto_tune together");
    }
    ctl->finish();
  }

  if (auto pr = root.object("pressure")) {
    if (auto v = pr->either("min_psi", units::pa_per_psi, "min_pa", 1.0)) c.bounds.min = *v;
    if (auto v = pr->either("max_psi", units::pa_per_psi, "max_pa", 1.0)) c.bounds.max = *v;
    pr->finish();
  }

  if (auto in = root.object("integration")) {
    if (auto v = in->number("dt_s")) c.integration.dt = *v;
    if (auto v = in->number("control_rate_hz")) c.integration.control_rate = *v;
    if (auto v = in->number("t_end_s")) c.integration.t_end = *v;
    in->finish();
  }

  if (auto mod = root.object("module")) {
    ModuleConfig m;
    m.winding_angle = c.geometry.winding_angle;
    if (auto v = mod->number("winding_angle_deg")) m.winding_angle = units::deg_to_rad(*v);
    if (auto v = mod->number("half_diagonal_mm")) m.half_diagonal = *v * mm;
    mod->finish();
    c.module = m;
  }

  root.finish();
  c.validate();
  return c;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

WorkbenchConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path));
}

control::ReferenceSignal parse_scenario(const std::string& json_text) {
  const json root_json = parse_json(json_text);
  Block root(root_json, "");
  const std::string kind = root.string("kind").value_or("step");
  if (kind != "step" && kind != "trajectory") {
    fail(fmt::format("'kind' must be step or trajectory, got '{}'", kind));
  }
  const bool incremental = root.boolean("incremental").value_or(false);
  const double ramp = root.number("ramp_s").value_or(2.0);
  const json* segs = root.array("segments");
  if (!segs || segs->empty()) fail("'segments' must be a non-empty array");
  std::vector<control::ReferenceSignal::Hold> holds;
  for (std::size_t i = 0; i < segs->size(); ++i) {
    Block seg((*segs)[i], fmt::format("segments[{}]", i));
    const auto d = seg.number("duration_s");
    const auto a = seg.number("angle_deg");
    if (!d || !a) fail(fmt::format("'segments[{}]' needs duration_s and angle_deg", i));
    if (!(*d > 0.0)) fail(fmt::format("'segments[{}].duration_s' must be > 0", i));
    seg.finish();
    holds.push_back({*d, units::deg_to_rad(*a)});
  }
  root.finish();
  try {
    return kind == "step" ? control::ReferenceSignal::steps(holds, incremental)
                          : control::ReferenceSignal::trajectory(holds, ramp);
  } catch (const Error& e) {
    fail(fmt::format("invalid scenario: {}", e.what()));
  }
}

PressureSchedule parse_pressure_schedule(const std::string& json_text) {
  const json root_json = parse_json(json_text);
  Block root(root_json, "");
  PressureSchedule s;
  if (auto v = root.number("t_end_s")) s.t_end = *v;
  if (!(s.t_end > 0.0)) fail("'t_end_s' must be > 0");
  const json* steps = root.array("steps");
  if (!steps || steps->empty()) fail("'steps' must be a non-empty array");
  double previous = -1.0;
  for (std::size_t i = 0; i < steps->size(); ++i) {
    Block step((*steps)[i], fmt::format("steps[{}]", i));
    const double start = step.number("start_s").value_or(0.0);
    const auto p = step.either("pressure_psi", units::pa_per_psi, "pressure_pa", 1.0);
    if (!p) fail(fmt::format("'steps[{}]' needs pressure_psi or pressure_pa", i));
    if (!(start > previous)) fail(fmt::format("'steps[{}].start_s' must increase", i));
    step.finish();
    previous = start;
    s.steps.push_back({start, *p});
  }
  root.finish();
  return s;
}

}  // namespace freelab::config
