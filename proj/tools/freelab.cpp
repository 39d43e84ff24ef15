// freelab: command-line front end for the FREE workbench.

#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "freelab/error.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("freelab");
  logger->set_pattern("freelab: %l: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FREELAB_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept "off" when asked for.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  using namespace freelab::cli;

  CLI::App app{"Soft actuator (FREE) workbench"};
  app.require_subcommand(1);
  Common common;
  for (int i = 1; i < argc; ++i) common.arguments.emplace_back(argv[i]);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON workbench configuration")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
  };

  MaterialOptions material;
  auto* mat = app.add_subcommand("material", "fit or evaluate elastomer models");
  add_common(mat);
  mat->add_option("action", material.action, "fit | eval")->required()
      ->check(CLI::IsMember({"fit", "eval"}));
  mat->add_option("--data", material.data, "stress-strain CSV")->check(CLI::ExistingFile);
  mat->add_option("--model", material.model, "ogden | linear")->capture_default_str();
  mat->add_option("--mu-mpa", material.mu_mpa, "fixed Ogden shear modulus");
  mat->add_option("--strain-cap", material.strain_cap)->capture_default_str();
  mat->add_option("--stretch-min", material.stretch_min)->capture_default_str();
  mat->add_option("--stretch-max", material.stretch_max)->capture_default_str();
  mat->add_option("--points", material.points)->capture_default_str();

  SimulateOptions simulate;
  auto* sim = app.add_subcommand("simulate", "open-loop response, nonlinear and linearized");
  add_common(sim);
  sim->add_option("--schedule", simulate.schedule, "JSON pressure schedule")
      ->check(CLI::ExistingFile);
  sim->add_option("--pressure-psi", simulate.pressure_psi, "constant pressure step at t = 0");
  sim->add_option("--t-end", simulate.t_end, "horizon [s]");
  sim->add_option("--stride", simulate.stride, "write every n-th step")->capture_default_str();

  ControlOptions ctl_opts;
  auto* ctl = app.add_subcommand("control", "closed-loop PID rotation control");
  add_common(ctl);
  ctl->add_option("--scenario", ctl_opts.scenario, "step | trajectory | JSON file")
      ->capture_default_str();
  ctl->add_option("--plant", ctl_opts.plant, "nonlinear | linearized")->capture_default_str();

  SweepOptions sweep;
  auto* swp = app.add_subcommand("sweep", "free and blocked response over winding angle");
  add_common(swp);
  swp->add_option("--angles-deg", sweep.angles_deg)->delimiter(',')->capture_default_str();
  swp->add_option("--pressures-psi", sweep.pressures_psi)->delimiter(',')->capture_default_str();

  LocusOptions locus;
  auto* loc = app.add_subcommand("locus", "root locus along one gain");
  add_common(loc);
  loc->add_option("--axis", locus.axis, "proportional | integral | derivative")
      ->capture_default_str();
  loc->add_option("--from", locus.from)->capture_default_str();
  loc->add_option("--to", locus.to, "upper gain; 0 means twice the configured gain");
  loc->add_option("--points", locus.points)->capture_default_str();

  SysidOptions sysid;
  auto* sid = app.add_subcommand("sysid", "identify stiffness or damping");
  add_common(sid);
  sid->add_option("--axis", sysid.axis, "axial | torsional")->capture_default_str();
  sid->add_option("--mode", sysid.mode, "stiffness | damping")->capture_default_str();
  sid->add_option("--data", sysid.data, "CSV data")->required()->check(CLI::ExistingFile);
  sid->add_option("--stiffness", sysid.stiffness, "override k for damping fits");
  sid->add_option("--inertia", sysid.inertia, "override mass or inertia for damping fits");
  sid->add_option("--noise-floor", sysid.noise_floor)->capture_default_str();

  WorkspaceOptions workspace;
  auto* wsp = app.add_subcommand("workspace", "LR module workspace cloud and paths");
  add_common(wsp);
  wsp->add_option("--cases", workspace.cases)->delimiter(',')->capture_default_str();
  wsp->add_option("--pressures-psi", workspace.pressures_psi, "grid; default 0-7 psi, 15 steps")
      ->delimiter(',');

  PoseOptions pose;
  auto* pos = app.add_subcommand("pose", "LR module pose for four actuator pressures");
  add_common(pos);
  pos->add_option("--pressures-psi", pose.pressures_psi)->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (*mat) return run_material(common, material);
    if (*sim) return run_simulate(common, simulate);
    if (*ctl) return run_control(common, ctl_opts);
    if (*swp) return run_sweep(common, sweep);
    if (*loc) return run_locus(common, locus);
    if (*sid) return run_sysid(common, sysid);
    if (*wsp) return run_workspace(common, workspace);
    if (*pos) return run_pose(common, pose);
  } catch (const freelab::Error& e) {
    spdlog::error("{}: {}", freelab::to_string(e.kind()), e.what());
    return e.kind() == freelab::ErrorKind::config ? exit_config : exit_numeric;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("ConfigError: {}", e.what());
    return exit_config;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return exit_numeric;
  }
  return exit_config;
}
