#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "freelab/config.hpp"
#include "freelab/control.hpp"
#include "freelab/csv.hpp"
#include "freelab/dynamics.hpp"
#include "freelab/error.hpp"
#include "freelab/manifest.hpp"
#include "freelab/materials.hpp"
#include "freelab/module_model.hpp"
#include "freelab/sysid.hpp"
#include "freelab/units.hpp"

namespace freelab::cli {

namespace fs = std::filesystem;
using csv::Table;
using std::int64_t;

namespace {

[[noreturn]] void bad_option(const std::string& message) {
  throw Error(ErrorKind::config, message);
}

// Loaded configuration plus the staged outputs and manifest of one run.
class Run {
 public:
  Run(std::string subcommand, const Common& common) : out_(common.out) {
    manifest_.subcommand = std::move(subcommand);
    manifest_.arguments = common.arguments;
    if (common.config.empty()) {
      config_ = config::default_config();
      manifest_.config_sha256 = manifest::sha256_hex("builtin");
    } else {
      const auto text = config::read_text(common.config);
      config_ = config::parse_config(text);
      manifest_.config_sha256 = manifest::sha256_hex(text);
    }
    spdlog::debug("{}: configuration loaded", manifest_.subcommand);
  }

  const config::WorkbenchConfig& cfg() const { return config_; }

  std::string input(const std::string& path) {
    const auto text = config::read_text(path);
    manifest_.inputs.push_back({fs::path(path).filename().string(), manifest::sha256_hex(text)});
    return text;
  }

  void record_input(const std::string& path) { (void)input(path); }

  void emit(const std::string& name, std::string content) {
    outputs_.add(fs::path(out_) / name, std::move(content));
  }

  int finish() {
    manifest_.outputs = outputs_.commit();
    manifest::OutputSet sidecar;
    sidecar.add(fs::path(out_) / (manifest_.subcommand + ".manifest.json"),
                manifest::render(manifest_));
    sidecar.commit();
    for (const auto& f : manifest_.outputs) spdlog::info("wrote {}", f.path);
    return 0;
  }

 private:
  std::string out_;
  config::WorkbenchConfig config_;
  manifest::RunManifest manifest_;
  manifest::OutputSet outputs_;
};

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string kv_table(const std::vector<std::pair<std::string, double>>& rows) {
  Table t({"quantity", "value"});
  for (const auto& [k, v] : rows) t.add_row({k, v});
  return t.str();
}

control::PidGains resolve_gains(const config::WorkbenchConfig& cfg) {
  if (!cfg.controller.auto_tune) return cfg.controller.gains;
  const auto report =
      control::tune_gains(cfg.geometry, cfg.params, 1.0 / cfg.integration.control_rate);
  spdlog::info("tuned gains kp={:.6g} ki={:.6g} kd={:.6g}", report.gains.proportional,
               report.gains.integral, report.gains.derivative);
  return report.gains;
}

module_model::ModuleGeometry build_module(const config::WorkbenchConfig& cfg) {
  const auto m = cfg.module.value_or(
      config::ModuleConfig{cfg.geometry.winding_angle, config::ModuleConfig{}.half_diagonal});
  module_model::ModuleGeometry module;
  const auto right = cfg.geometry.with_winding_angle(m.winding_angle)
                         .with_handedness(kinematics::Handedness::right);
  const auto left = right.with_handedness(kinematics::Handedness::left);
  module.actuators = {right, left, right, left};
  module.half_diagonal = m.half_diagonal;
  module.params = dynamics::default_lumped_params(right, cfg.recipe.moduli,
                                                  cfg.recipe.damping_ratio,
                                                  cfg.recipe.end_cap_mass);
  try {
    module.validate();
  } catch (const Error& e) {
    bad_option(fmt::format("invalid 'module' block: {}", e.what()));
  }
  return module;
}

std::vector<double> psi_list(const std::vector<double>& psi, const char* flag) {
  std::vector<double> pa;
  for (const double p : psi) {
    if (!(p >= 0.0) || !std::isfinite(p)) bad_option(fmt::format("{} values must be >= 0", flag));
    pa.push_back(units::psi_to_pa(p));
  }
  return pa;
}

}  // namespace

// ---------------------------------------------------------------------------

int run_material(const Common& c, const MaterialOptions& o) {
  Run run("material", c);
  const auto& mat = run.cfg().material;
  if (o.action == "fit") {
    if (o.data.empty()) bad_option("material fit needs --data");
    if (o.model != "ogden" && o.model != "linear") bad_option("--model must be ogden or linear");
    run.record_input(o.data);
    const auto table = csv::read_numeric(o.data);
    std::vector<materials::StressStrainSample> samples;
    const bool engineering = std::find(table.header.begin(), table.header.end(), "strain") !=
                             table.header.end();
    if (engineering) {
      const auto cs = table.column("strain");
      const auto cp = table.column("eng_stress_pa");
      std::vector<double> strain;
      std::vector<double> stress;
      for (const auto& r : table.rows) {
        strain.push_back(r[cs]);
        stress.push_back(r[cp]);
      }
      samples = materials::from_engineering(strain, stress);
    } else {
      const auto cs = table.column("stretch");
      const auto cp = table.column("true_stress_pa");
      for (const auto& r : table.rows) samples.push_back({r[cs], r[cp]});
    }
    if (o.model == "ogden") {
      const double mu = o.mu_mpa ? *o.mu_mpa * 1e6 : mat.ogden.mu;
      const auto fit = materials::fit_ogden(samples, mu);
      run.emit("material_fit.csv", kv_table({{"shear_modulus_pa", fit.params.mu},
                                             {"alpha", fit.params.alpha},
                                             {"rmsd_pa", fit.rmsd}}));
    } else {
      const auto fit = materials::fit_linear_modulus(samples, o.strain_cap);
      run.emit("material_fit.csv", kv_table({{"youngs_modulus_pa", fit.youngs_modulus},
                                             {"shore_a", materials::modulus_to_shore(
                                                             fit.youngs_modulus)}}));
    }
  } else if (o.action == "eval") {
    if (!(o.stretch_min > 0.0) || !(o.stretch_max >= o.stretch_min) || o.points < 2) {
      bad_option("eval needs 0 < --stretch-min <= --stretch-max and --points >= 2");
    }
    Table t({"stretch", "ogden_pa", "neo_hookean_pa", "linear_pa"});
    for (int i = 0; i < o.points; ++i) {
      const double l = o.stretch_min + (o.stretch_max - o.stretch_min) * i / (o.points - 1);
      t.add_row({l, materials::ogden_uniaxial_stress(l, mat.ogden),
                 materials::neo_hookean_uniaxial_stress(l, mat.neo_hookean),
                 materials::linear_uniaxial_stress(l - 1.0, mat.linear)});
    }
    run.emit("material_eval.csv", t.str());
  } else {
    bad_option("material action must be fit or eval");
  }
  return run.finish();
}

int run_simulate(const Common& c, const SimulateOptions& o) {
  Run run("simulate", c);
  const auto& cfg = run.cfg();
  if (o.stride < 1) bad_option("--stride must be >= 1");
  config::PressureSchedule schedule;
  if (!o.schedule.empty()) {
    if (o.pressure_psi) bad_option("give --schedule or --pressure-psi, not both");
    schedule = config::parse_pressure_schedule(run.input(o.schedule));
  } else {
    const double p = o.pressure_psi.value_or(0.0);
    if (!(p >= 0.0)) bad_option("--pressure-psi must be >= 0");
    schedule.t_end = cfg.integration.t_end;
    schedule.steps = {{0.0, units::psi_to_pa(p)}};
  }
  if (o.t_end) {
    if (!(*o.t_end > 0.0)) bad_option("--t-end must be > 0");
    schedule.t_end = *o.t_end;
  }

  const auto signal = dynamics::PressureSignal::steps(schedule.steps, cfg.bounds);
  const dynamics::IntegrationOptions opts{schedule.t_end, cfg.integration.dt};
  const auto nl = dynamics::integrate(dynamics::PlantModel::nonlinear, {}, signal, opts,
                                      cfg.geometry, cfg.params);
  const auto lin = dynamics::integrate(dynamics::PlantModel::linearized, {}, signal, opts,
                                       cfg.geometry, cfg.params);

  const double R = cfg.geometry.outer_radius;
  const double G = cfg.geometry.winding_angle;
  Table t({"t_s", "pressure_pa", "s_m", "phi_rad", "s_linearized_m", "phi_linearized_rad",
           "r_change_pct", "gamma_change_pct"});
  double max_r = 0.0;
  double max_g = 0.0;
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const auto conf = kinematics::configuration(cfg.geometry, nl[i].state.s, nl[i].state.phi);
    const double dr = 100.0 * (conf.r - R) / R;
    const double dg = 100.0 * (conf.gamma - G) / G;
    max_r = std::max(max_r, std::abs(dr));
    max_g = std::max(max_g, std::abs(dg));
    if (i % static_cast<std::size_t>(o.stride) == 0 || i + 1 == nl.size()) {
      t.add_row({nl[i].t, nl[i].pressure, nl[i].state.s, nl[i].state.phi, lin[i].state.s,
                 lin[i].state.phi, dr, dg});
    }
  }
  const auto& last = nl.back();
  const double p_lin =
      dynamics::linearized_pressure_for_twist(last.state.phi, cfg.geometry, cfg.params);
  const double excess = last.pressure > 0.0 ? 100.0 * (p_lin / last.pressure - 1.0) : 0.0;
  // Steady comparison at the final pressure, independent of the horizon.
  double static_phi = std::nan("");
  double static_excess = std::nan("");
  if (last.pressure > 0.0) {
    try {
      static_phi = dynamics::static_equilibrium(last.pressure, cfg.geometry, cfg.params).phi;
      static_excess = 100.0 * (dynamics::linearized_pressure_for_twist(static_phi, cfg.geometry,
                                                                       cfg.params) /
                                   last.pressure -
                               1.0);
    } catch (const Error& e) {
      spdlog::warn("no static equilibrium at the final pressure: {}", e.what());
    }
  }
  run.emit("simulate.csv", t.str());
  run.emit("simulate_summary.csv",
           kv_table({{"max_abs_r_change_pct", max_r},
                     {"max_abs_gamma_change_pct", max_g},
                     {"final_pressure_pa", last.pressure},
                     {"final_phi_rad", last.state.phi},
                     {"final_phi_linearized_rad", lin.back().state.phi},
                     {"linearized_pressure_for_final_phi_pa", p_lin},
                     {"linearized_pressure_excess_pct", excess},
                     {"static_phi_rad", static_phi},
                     {"static_linearized_pressure_excess_pct", static_excess}}));
  return run.finish();
}

int run_control(const Common& c, const ControlOptions& o) {
  Run run("control", c);
  const auto& cfg = run.cfg();
  dynamics::PlantModel plant{};
  if (o.plant == "nonlinear") plant = dynamics::PlantModel::nonlinear;
  else if (o.plant == "linearized") plant = dynamics::PlantModel::linearized;
  else bad_option("--plant must be nonlinear or linearized");

  std::optional<control::ReferenceSignal> reference;
  if (o.scenario == "step") reference = control::step_scenario();
  else if (o.scenario == "trajectory") reference = control::trajectory_scenario();
  else reference = config::parse_scenario(run.input(o.scenario));

  const auto gains = resolve_gains(cfg);
  control::ClosedLoopOptions opts;
  opts.plant = plant;
  opts.control_rate = cfg.integration.control_rate;
  opts.dt = cfg.integration.dt;
  opts.bounds = cfg.bounds;
  const auto samples = control::closed_loop_sim(cfg.geometry, cfg.params, gains, *reference, opts);

  const auto every = static_cast<std::size_t>(
      std::max(1L, std::lround(1.0 / (cfg.integration.control_rate * cfg.integration.dt))));
  Table t({"t_s", "phi_d_rad", "phi_rad", "phi_dot_rad_per_s", "s_m", "pressure_pa"});
  std::vector<double> want;
  std::vector<double> got;
  double p_min = samples.front().pressure;
  double p_max = p_min;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    want.push_back(s.phi_d);
    got.push_back(s.phi);
    p_min = std::min(p_min, s.pressure);
    p_max = std::max(p_max, s.pressure);
    if (i % every == 0) t.add_row({s.t, s.phi_d, s.phi, s.phi_dot, s.s, s.pressure});
  }
  double full_scale = 0.0;
  for (const auto& seg : reference->segments()) full_scale = std::max(full_scale, std::abs(seg.target));
  const double err = control::rmsd(want, got);

  std::vector<std::pair<std::string, double>> metrics{
      {"kp_pa_per_rad", gains.proportional},
      {"ki_pa_per_rad_s", gains.integral},
      {"kd_pa_s_per_rad", gains.derivative},
      {"rmsd_rad", err},
      {"rmsd_pct_full_scale", full_scale > 0.0 ? 100.0 * err / full_scale : 0.0},
      {"min_pressure_pa", p_min},
      {"max_pressure_pa", p_max}};
  // Error just before each switch and at the end.
  auto switches = reference->switch_times();
  switches.push_back(reference->duration());
  for (std::size_t k = 1; k < switches.size(); ++k) {
    const double ts = switches[k];
    const auto it = std::lower_bound(samples.begin(), samples.end(), ts - 0.5 * opts.dt,
                                     [](const auto& s, double v) { return s.t < v; });
    const auto& s = it == samples.begin() ? *it : *(it - 1);
    metrics.push_back({fmt::format("segment{}_final_error_rad", k), s.phi_d - s.phi});
  }
  run.emit("control.csv", t.str());
  run.emit("control_metrics.csv", kv_table(metrics));
  return run.finish();
}

int run_sweep(const Common& c, const SweepOptions& o) {
  Run run("sweep", c);
  const auto& cfg = run.cfg();
  std::vector<double> angles;
  for (const double a : o.angles_deg) {
    if (!(a > 0.0 && a < 90.0)) bad_option("--angles-deg values must lie in (0, 90)");
    angles.push_back(units::deg_to_rad(a));
  }
  const auto pressures = psi_list(o.pressures_psi, "--pressures-psi");
  const auto recipe = cfg.recipe;
  const auto rows = dynamics::sweep_winding(
      cfg.geometry,
      [&](const kinematics::FreeGeometry& g) {
        return dynamics::default_lumped_params(g, recipe.moduli, recipe.damping_ratio,
                                               recipe.end_cap_mass);
      },
      angles, pressures);
  Table t({"winding_angle_rad", "pressure_pa", "twist_per_length_rad_per_m", "extension_ratio",
           "blocked_force_n", "blocked_moment_nm", "status"});
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (r.status != "ok") ++failed;
    t.add_row({r.winding_angle, r.pressure, r.twist_per_length, r.extension_ratio,
               r.blocked_force, r.blocked_moment, sanitize(r.status)});
  }
  if (failed) spdlog::warn("sweep: {} of {} points have no equilibrium", failed, rows.size());
  run.emit("sweep.csv", t.str());
  return run.finish();
}

int run_locus(const Common& c, const LocusOptions& o) {
  Run run("locus", c);
  const auto& cfg = run.cfg();
  control::GainAxis axis{};
  if (o.axis == "proportional") axis = control::GainAxis::proportional;
  else if (o.axis == "integral") axis = control::GainAxis::integral;
  else if (o.axis == "derivative") axis = control::GainAxis::derivative;
  else bad_option("--axis must be proportional, integral or derivative");
  if (o.points < 2) bad_option("--points must be >= 2");

  const auto base = resolve_gains(cfg);
  const double to = o.to != 0.0 ? o.to : 2.0 * control::gain(base, axis);
  if (to == o.from) bad_option("empty gain range; set --to");
  std::vector<double> grid;
  for (int i = 0; i < o.points; ++i) grid.push_back(o.from + (to - o.from) * i / (o.points - 1));
  const auto rows = control::root_locus(base, axis, grid, cfg.geometry, cfg.params);
  Table t({"gain", "root1_re", "root1_im", "root2_re", "root2_im", "root3_re", "root3_im",
           "stable"});
  for (const auto& r : rows) {
    const auto& z = r.roots.roots;
    t.add_row({r.gain, z[0].real(), z[0].imag(), z[1].real(), z[1].imag(), z[2].real(),
               z[2].imag(), int64_t{r.roots.stable}});
  }
  const auto boundary =
      control::stability_boundary(base, axis, o.from, to, cfg.geometry, cfg.params);
  Table b({"axis", "boundary_gain", "found"});
  b.add_row({o.axis, boundary.value_or(std::nan("")), int64_t{boundary.has_value()}});
  run.emit("locus.csv", t.str());
  run.emit("locus_boundary.csv", b.str());
  return run.finish();
}

int run_sysid(const Common& c, const SysidOptions& o) {
  Run run("sysid", c);
  const auto& cfg = run.cfg();
  sysid::Axis axis{};
  if (o.axis == "axial") axis = sysid::Axis::axial;
  else if (o.axis == "torsional") axis = sysid::Axis::torsional;
  else bad_option("--axis must be axial or torsional");
  if (o.data.empty()) bad_option("sysid needs --data");
  run.record_input(o.data);
  const auto table = csv::read_numeric(o.data);

  if (o.mode == "stiffness") {
    const auto cl = table.column("load");
    const auto cd = table.column("displacement");
    std::vector<sysid::StaticLoadSample> samples;
    for (const auto& r : table.rows) samples.push_back({r[cl], r[cd], axis});
    const auto fit = sysid::fit_stiffness(samples);
    run.emit("sysid.csv", kv_table({{"stiffness", fit.stiffness},
                                    {"rms_residual", fit.rms_residual},
                                    {"samples", static_cast<double>(samples.size())}}));
  } else if (o.mode == "damping") {
    const auto ct = table.column("t");
    const auto cd = table.column("displacement");
    sysid::VibrationTrace trace;
    trace.axis = axis;
    for (const auto& r : table.rows) {
      trace.t.push_back(r[ct]);
      trace.displacement.push_back(r[cd]);
    }
    const bool axial = axis == sysid::Axis::axial;
    const double k = o.stiffness.value_or(axial ? cfg.params.axial_stiffness
                                                : cfg.params.torsional_stiffness);
    const double inertia =
        o.inertia.value_or(axial ? cfg.params.end_cap_mass : cfg.params.end_cap_inertia);
    const auto fit = sysid::fit_damping(trace, k, inertia, o.noise_floor);
    run.emit("sysid.csv", kv_table({{"damping", fit.damping},
                                    {"damping_ratio", fit.damping_ratio},
                                    {"log_decrement", fit.log_decrement},
                                    {"peaks", static_cast<double>(fit.peaks)}}));
  } else {
    bad_option("--mode must be stiffness or damping");
  }
  return run.finish();
}

int run_workspace(const Common& c, const WorkspaceOptions& o) {
  Run run("workspace", c);
  const auto module = build_module(run.cfg());
  for (const int k : o.cases) {
    if (k < 1 || k > 5) bad_option("--cases values must lie in 1..5");
  }
  const auto pressures = o.pressures_psi.empty() ? module_model::default_pressure_grid()
                                                 : psi_list(o.pressures_psi, "--pressures-psi");
  const auto ws = module_model::workspace(module, o.cases, pressures);

  Table cloud({"case", "variation", "pressure_pa", "x", "y", "z", "twist"});
  for (const auto& p : ws.points) {
    cloud.add_row({int64_t{p.case_id}, int64_t{p.variation}, p.pressure, p.pose.x, p.pose.y,
                   p.pose.z, p.pose.twist});
  }
  Table paths({"case", "variation", "points"});
  for (const auto& p : ws.paths) {
    std::string ids;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
      ids += (i ? ";" : "") + std::to_string(p.points[i]);
    }
    paths.add_row({int64_t{p.case_id}, int64_t{p.variation}, ids});
  }
  Table failures({"case", "variation", "pressure_pa", "reason"});
  for (const auto& f : ws.failures) {
    failures.add_row({int64_t{f.case_id}, int64_t{f.variation}, f.pressure, sanitize(f.reason)});
  }
  Table mesh({"a", "b", "c"});
  for (const auto& tri : ws.boundary) {
    mesh.add_row({static_cast<int64_t>(tri[0]), static_cast<int64_t>(tri[1]),
                  static_cast<int64_t>(tri[2])});
  }
  if (!ws.failures.empty()) {
    spdlog::warn("workspace: {} points have no equilibrium", ws.failures.size());
  }
  run.emit("workspace.csv", cloud.str());
  run.emit("workspace_paths.csv", paths.str());
  run.emit("workspace_failures.csv", failures.str());
  run.emit("workspace_boundary.csv", mesh.str());
  return run.finish();
}

int run_pose(const Common& c, const PoseOptions& o) {
  Run run("pose", c);
  const auto module = build_module(run.cfg());
  if (o.pressures_psi.size() != 4) bad_option("--pressures-psi needs four values");
  const auto pa = psi_list(o.pressures_psi, "--pressures-psi");
  module_model::ActuationPattern pattern;
  for (std::size_t i = 0; i < 4; ++i) {
    pattern.pressure[i] = pa[i];
    pattern.active[i] = pa[i] > 0.0;
  }
  const auto pose = module_model::module_pose(module, pattern);
  run.emit("pose.csv", kv_table({{"x_m", pose.x},
                                 {"y_m", pose.y},
                                 {"z_m", pose.z},
                                 {"twist_rad", pose.twist},
                                 {"azimuth_rad", pose.azimuth},
                                 {"tilt_rad", pose.tilt}}));
  return run.finish();
}

}  // namespace freelab::cli
