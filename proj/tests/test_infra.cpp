#include <filesystem>
#include <fstream>

#include "freelab/config.hpp"
#include "freelab/csv.hpp"
#include "freelab/manifest.hpp"
#include "freelab/units.hpp"
#include "support.hpp"

using namespace freelab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("freelab_infra_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string expect_config_error(const std::string& text) {
  try {
    config::parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

}  // namespace

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(csv::format_number(0.0), "0");
  EXPECT_EQ(csv::format_number(-0.0), "0");
  EXPECT_EQ(csv::format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(csv::format_number(6894.757), "6894.757");
  EXPECT_EQ(csv::format_number(1.5e-12), "1.5e-12");
  EXPECT_EQ(csv::format_number(std::nan("")), "nan");
}

TEST(Csv, TableAndReader) {
  csv::Table t({"a", "b", "label"});
  t.add_row({1.25, std::int64_t{3}, std::string("x")});
  t.add_row({-2.0, std::int64_t{-4}, std::string("y")});
  EXPECT_EQ(t.str(), "a,b,label\n1.25,3,x\n-2,-4,y\n");
  EXPECT_FREELAB_ERROR(t.add_row({1.0}), invalid_argument);

  const auto dir = scratch_dir("csv");
  std::ofstream(dir / "n.csv") << "# comment\nstretch, true_stress_pa\n1.0,0\n1.5, 2e5\n\n";
  const auto n = csv::read_numeric(dir / "n.csv");
  EXPECT_EQ(n.header, (std::vector<std::string>{"stretch", "true_stress_pa"}));
  ASSERT_EQ(n.rows.size(), 2u);
  EXPECT_EQ(n.rows[1][1], 2e5);
  EXPECT_EQ(n.column("true_stress_pa"), 1u);
  EXPECT_FREELAB_ERROR(n.column("missing"), config);

  std::ofstream(dir / "bad.csv") << "t,displacement\n0,1\n0.1,abc\n";
  try {
    csv::read_numeric(dir / "bad.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  EXPECT_FREELAB_ERROR(csv::read_numeric(dir / "none.csv"), config);
}

TEST(Config, DefaultsMatchCanonicalFree) {
  const auto c = config::parse_config("{}");
  EXPECT_EQ(c.geometry.length, 0.175);
  EXPECT_EQ(c.geometry.handedness, kinematics::Handedness::left);
  EXPECT_NEAR(c.geometry.winding_angle, units::deg_to_rad(40), 1e-15);
  EXPECT_TRUE(c.controller.auto_tune);
  EXPECT_EQ(c.bounds.max, 7.0 * units::pa_per_psi);
  EXPECT_FALSE(c.module.has_value());
}

TEST(Config, UnitSuffixesConvert) {
  const auto c = config::parse_config(R"({
    "free": {"length_mm": 100, "inner_radius_mm": 4, "wall_mm": 1, "winding_angle_deg": 60,
             "handedness": "right", "n_fibers": 4},
    "lumped": {"end_cap_mass_g": 10, "torsional_stiffness_nm_per_rad": 0.002},
    "controller": {"kp_pa_per_rad": 1, "ki_pa_per_rad_s": 2, "kd_pa_s_per_rad": 3},
    "pressure": {"max_psi": 2},
    "integration": {"dt_s": 5e-5, "control_rate_hz": 200},
    "module": {"winding_angle_deg": 30, "half_diagonal_mm": 20}
  })");
  EXPECT_EQ(c.geometry.length, 0.1);
  EXPECT_NEAR(c.geometry.outer_radius, 5e-3, 1e-15);
  EXPECT_EQ(c.geometry.n_fibers, 4);
  EXPECT_EQ(c.params.end_cap_mass, 0.01);
  EXPECT_EQ(c.params.torsional_stiffness, 0.002);
  EXPECT_NEAR(c.params.end_cap_inertia, 0.5 * 0.01 * 25e-6, 1e-20);
  EXPECT_FALSE(c.controller.auto_tune);
  EXPECT_EQ(c.controller.gains.derivative, 3.0);
  EXPECT_EQ(c.bounds.max, 2.0 * 6894.757);
  EXPECT_EQ(c.integration.control_rate, 200.0);
  ASSERT_TRUE(c.module.has_value());
  EXPECT_NEAR(c.module->half_diagonal, 0.02, 1e-15);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_NE(expect_config_error(R"({"free": {"lenght_mm": 1}})").find("free.lenght_mm"),
            std::string::npos);
  EXPECT_NE(expect_config_error(R"({"bogus": 1})").find("bogus"), std::string::npos);
  EXPECT_NE(expect_config_error(R"({"free": {"winding_angle_deg": "x"}})")
                .find("free.winding_angle_deg"),
            std::string::npos);
  EXPECT_NE(expect_config_error(R"({"free": {"winding_angle_deg": 95}})").find("free"),
            std::string::npos);
  EXPECT_NE(expect_config_error(R"({"pressure": {"max_psi": 1, "max_pa": 5}})").find("max_pa"),
            std::string::npos);
  EXPECT_NE(expect_config_error(R"({"pressure": {"min_psi": -1}})").find("pressure"),
            std::string::npos);
  EXPECT_NE(expect_config_error(R"({"integration": {"dt_s": 0}})").find("dt_s"),
            std::string::npos);
  expect_config_error("{ not json");
  expect_config_error(R"({"controller": {"auto_tune": true, "kp_pa_per_rad": 5}})");
}

TEST(Config, Scenario) {
  const auto r = config::parse_scenario(R"({"kind": "step", "incremental": true,
      "segments": [{"duration_s": 1, "angle_deg": 10}, {"duration_s": 2, "angle_deg": 5}]})");
  EXPECT_EQ(r.duration(), 3.0);
  EXPECT_NEAR(r(2.0).angle, units::deg_to_rad(15), 1e-15);
  EXPECT_FREELAB_ERROR(config::parse_scenario(R"({"kind": "ramp", "segments": []})"), config);
  EXPECT_FREELAB_ERROR(
      config::parse_scenario(R"({"segments": [{"duration_s": 0, "angle_deg": 1}]})"), config);
}

TEST(Config, PressureSchedule) {
  const auto s = config::parse_pressure_schedule(
      R"({"t_end_s": 2, "steps": [{"start_s": 0, "pressure_psi": 1}, {"start_s": 1, "pressure_pa": 50}]})");
  EXPECT_EQ(s.t_end, 2.0);
  ASSERT_EQ(s.steps.size(), 2u);
  EXPECT_EQ(s.steps[0].pressure, 6894.757);
  EXPECT_EQ(s.steps[1].pressure, 50.0);
  EXPECT_FREELAB_ERROR(config::parse_pressure_schedule(
                           R"({"steps": [{"start_s": 1, "pressure_pa": 1}, {"start_s": 0, "pressure_pa": 1}]})"),
                       config);
}

TEST(Manifest, Sha256KnownVectors) {
  EXPECT_EQ(manifest::sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(manifest::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, RenderIsStable) {
  manifest::RunManifest m{"sweep", {"--out", "x"}, "abc", {}, {{"sweep.csv", "00"}}};
  const auto a = manifest::render(m);
  EXPECT_EQ(a, manifest::render(m));
  EXPECT_NE(a.find("\"subcommand\": \"sweep\""), std::string::npos);
  EXPECT_EQ(a.find("time"), std::string::npos);
}

TEST(Manifest, OutputSetWritesOnCommit) {
  const auto dir = scratch_dir("out");
  manifest::OutputSet out;
  out.add(dir / "a.csv", "x\n1\n");
  EXPECT_FALSE(fs::exists(dir / "a.csv"));
  const auto d = out.commit();
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].sha256, manifest::sha256_hex("x\n1\n"));
  EXPECT_TRUE(fs::exists(dir / "a.csv"));
  EXPECT_FALSE(fs::exists(dir / "a.csv.tmp"));
}
