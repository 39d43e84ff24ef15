#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "freelab/control.hpp"
#include "freelab/dynamics.hpp"
#include "freelab/materials.hpp"

// Workbench configuration. JSON keys carry their unit as a suffix
// (length_mm, max_psi, dt_s); everything is converted to SI on load.
// Unknown keys are rejected.

namespace freelab::config {

enum class MaterialModel { ogden, neo_hookean, linear };

struct MaterialConfig {
  MaterialModel model = MaterialModel::ogden;
  materials::OgdenParams ogden = materials::calibrated_latex_ogden();
  materials::NeoHookeanParams neo_hookean{materials::calibrated_latex_ogden().mu};
  materials::LinearParams linear = materials::calibrated_latex_linear();
};

struct ControllerConfig {
  bool auto_tune = true;
  control::PidGains gains;
};

struct IntegrationConfig {
  double dt = 1e-4;             // [s]
  double control_rate = 100.0;  // [Hz]
  double t_end = 1.0;           // open-loop horizon [s]
};

struct ModuleConfig {
  double winding_angle = 0.0;  // [rad]
  double half_diagonal = 0.015;
};

// Inputs of the default lumped parameters, kept so that other geometries
// (sweeps, modules) can be given matching defaults.
struct LumpedRecipe {
  dynamics::ElastomerModuli moduli;
  double damping_ratio = 0.1;
  double end_cap_mass = 0.005;  // [kg]
};

struct WorkbenchConfig {
  kinematics::FreeGeometry geometry;
  dynamics::LumpedParams params;
  LumpedRecipe recipe;
  MaterialConfig material;
  ControllerConfig controller;
  dynamics::PressureBounds bounds{0.0, 7.0 * 6894.757};
  IntegrationConfig integration;
  std::optional<ModuleConfig> module;

  void validate() const;
};

/// Built-in configuration: canonical 40 deg left-handed FREE.
WorkbenchConfig default_config();

/// Throws Error(config) naming the offending key.
WorkbenchConfig parse_config(const std::string& json_text);
WorkbenchConfig load_config(const std::filesystem::path& path);

/// Reference schedule file: {"kind": "step"|"trajectory", "incremental": bool,
/// "ramp_s": number, "segments": [{"duration_s": .., "angle_deg": ..}]}.
control::ReferenceSignal parse_scenario(const std::string& json_text);

/// Open-loop pressure schedule: {"t_end_s": .., "steps": [{"start_s": ..,
/// "pressure_psi" or "pressure_pa": ..}]}.
struct PressureSchedule {
  double t_end = 1.0;
  std::vector<dynamics::PressureSignal::Breakpoint> steps;
};
PressureSchedule parse_pressure_schedule(const std::string& json_text);

std::string read_text(const std::filesystem::path& path);

}  // namespace freelab::config
