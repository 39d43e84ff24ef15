#pragma once

#include <optional>
#include <string>
#include <vector>

namespace freelab::cli {

struct Common {
  std::string config;  // empty: built-in defaults
  std::string out = ".";
  std::vector<std::string> arguments;  // as given, for the manifest
};

struct MaterialOptions {
  std::string action;  // fit | eval
  std::string data;
  std::string model = "ogden";
  std::optional<double> mu_mpa;
  double strain_cap = 0.1;
  double stretch_min = 0.5;
  double stretch_max = 3.0;
  int points = 26;
};

struct SimulateOptions {
  std::string schedule;
  std::optional<double> pressure_psi;
  std::optional<double> t_end;
  int stride = 10;
};

struct ControlOptions {
  std::string scenario = "step";  // step | trajectory | <file>
  std::string plant = "nonlinear";
};

struct SweepOptions {
  std::vector<double> angles_deg{10, 20, 30, 40, 50, 60, 70, 80};
  std::vector<double> pressures_psi{0, 1, 2, 3, 4, 5, 6, 7};
};

struct LocusOptions {
  std::string axis = "integral";
  double from = 0.0;
  double to = 0.0;  // 0: twice the tuned value
  int points = 101;
};

struct SysidOptions {
  std::string axis = "torsional";
  std::string mode = "stiffness";
  std::string data;
  std::optional<double> stiffness;
  std::optional<double> inertia;
  double noise_floor = 0.01;
};

struct WorkspaceOptions {
  std::vector<int> cases{1, 2, 3, 4, 5};
  std::vector<double> pressures_psi;  // empty: 0 to 7 psi in 15 steps
};

struct PoseOptions {
  std::vector<double> pressures_psi;  // four values
};

int run_material(const Common& c, const MaterialOptions& o);
int run_simulate(const Common& c, const SimulateOptions& o);
int run_control(const Common& c, const ControlOptions& o);
int run_sweep(const Common& c, const SweepOptions& o);
int run_locus(const Common& c, const LocusOptions& o);
int run_sysid(const Common& c, const SysidOptions& o);
int run_workspace(const Common& c, const WorkspaceOptions& o);
int run_pose(const Common& c, const PoseOptions& o);

}  // namespace freelab::cli
