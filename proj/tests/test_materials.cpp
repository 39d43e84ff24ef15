#include <cmath>
#include <random>
#include <vector>

#include "freelab/materials.hpp"
#include "support.hpp"

using namespace freelab;
using namespace freelab::materials;
using testing_support::rel_err;

namespace {

const OgdenParams latex{0.393e6, 1.2};

// lambda * d/dlambda of the incompressible uniaxial energy, central difference.
template <class Energy>
double fd_stress(Energy&& energy, double stretch) {
  auto w = [&](double l) { return energy(l, 1.0 / std::sqrt(l), 1.0 / std::sqrt(l)); };
  const double h = 1e-5 * stretch;
  return stretch * (w(stretch + h) - w(stretch - h)) / (2.0 * h);
}

std::vector<StressStrainSample> synthetic(const OgdenParams& p) {
  std::vector<StressStrainSample> out;
  for (int i = 0; i <= 20; ++i) {
    const double l = 0.8 + 2.2 * i / 20.0;
    out.push_back({l, ogden_uniaxial_stress(l, p)});
  }
  return out;
}

}  // namespace

TEST(Ogden, EnergyZeroAtIdentity) {
  EXPECT_EQ(ogden_energy(1, 1, 1, latex), 0.0);
  EXPECT_EQ(ogden_energy(1, 1, 1, {1.0, -3.0}), 0.0);
}

TEST(Ogden, EnergyAtUniaxialOnePointFive) {
  const double l = 1.5;
  const double t = 1.0 / std::sqrt(l);
  EXPECT_LT(rel_err(ogden_energy(l, t, t, latex), 106335.44017218373), 1e-12);
}

TEST(Ogden, AlphaTwoIsNeoHookeanEnergy) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(0.3, 3.0);
  for (int k = 0; k < 100; ++k) {
    const double a = d(rng);
    const double b = d(rng);
    const double c = 1.0 / (a * b);
    const double i1 = a * a + b * b + c * c;
    EXPECT_LT(rel_err(ogden_energy(a, b, c, {0.5e6, 2.0}), 0.25e6 * (i1 - 3.0)), 1e-12);
    EXPECT_LT(rel_err(neo_hookean_energy(a, b, c, {0.5e6}), 0.25e6 * (i1 - 3.0)), 1e-12);
  }
}

TEST(Ogden, RejectsNonPositiveStretch) {
  EXPECT_FREELAB_ERROR(ogden_energy(0.0, 1, 1, latex), non_positive_stretch);
  EXPECT_FREELAB_ERROR(ogden_uniaxial_stress(-1.0, latex), non_positive_stretch);
  EXPECT_FREELAB_ERROR(neo_hookean_uniaxial_stress(0.0, {1e5}), non_positive_stretch);
}

TEST(Ogden, UniaxialStressExample) {
  EXPECT_LT(rel_err(ogden_uniaxial_stress(1.5, latex), 551939.0086992981), 1e-12);
  EXPECT_NEAR(ogden_uniaxial_stress(1.5, latex), 0.552e6, 0.001e6);
}

TEST(NeoHookean, StressExample) {
  EXPECT_LT(rel_err(neo_hookean_uniaxial_stress(1.2, {0.393e6}), 238420.0), 1e-12);
}

TEST(NeoHookean, DivergesNearZero) {
  double prev = 0.0;
  for (double l : {0.5, 0.1, 1e-3, 1e-6}) {
    const double s = neo_hookean_uniaxial_stress(l, {0.393e6});
    EXPECT_LT(s, prev);
    prev = s;
  }
  EXPECT_LT(prev, -1e11);
}

TEST(Linear, Examples) {
  EXPECT_EQ(linear_uniaxial_stress(0.0, calibrated_latex_linear()), 0.0);
  EXPECT_LT(rel_err(linear_uniaxial_stress(0.1, calibrated_latex_linear()), 0.118e6), 1e-14);
  EXPECT_LT(rel_err(linear_uniaxial_stress(-0.1, calibrated_latex_linear()), -0.118e6), 1e-14);
}

TEST(Stress, EnergyConsistencyAndMonotone) {
  const NeoHookeanParams nh{0.393e6};
  for (int i = 0; i <= 250; ++i) {
    const double l = 0.5 + 2.5 * i / 250.0;
    if (std::abs(l - 1.0) < 1e-9) continue;
    const double so = ogden_uniaxial_stress(l, latex);
    const double sn = neo_hookean_uniaxial_stress(l, nh);
    EXPECT_LT(rel_err(so, fd_stress([](double a, double b, double c) {
                        return ogden_energy(a, b, c, latex);
                      }, l)),
              1e-6);
    EXPECT_LT(rel_err(sn, fd_stress([&](double a, double b, double c) {
                        return neo_hookean_energy(a, b, c, nh);
                      }, l)),
              1e-6);
    EXPECT_EQ(std::signbit(so), l < 1.0);
    EXPECT_EQ(std::signbit(sn), l < 1.0);
    EXPECT_LT(ogden_uniaxial_stress(l, latex), ogden_uniaxial_stress(l + 1e-3, latex));
    EXPECT_LT(neo_hookean_uniaxial_stress(l, nh), neo_hookean_uniaxial_stress(l + 1e-3, nh));
  }
  EXPECT_EQ(ogden_uniaxial_stress(1.0, latex), 0.0);
  EXPECT_EQ(neo_hookean_uniaxial_stress(1.0, nh), 0.0);
}

TEST(Stress, OgdenAlphaTwoEqualsNeoHookean) {
  for (int i = 0; i <= 100; ++i) {
    const double l = 0.5 + 2.5 * i / 100.0;
    const double a = ogden_uniaxial_stress(l, {0.393e6, 2.0});
    const double b = neo_hookean_uniaxial_stress(l, {0.393e6});
    EXPECT_LE(std::abs(a - b), 1e-12 * std::max(std::abs(b), 1.0)) << l;
  }
}

TEST(Hardness, CalibratedLatexAnchor) {
  EXPECT_NEAR(shore_to_modulus(30.8), 1.18e6, 0.01e6);
  EXPECT_LT(rel_err(shore_to_modulus(30.8), 1.1803324402596068e6), 1e-12);
  EXPECT_NEAR(modulus_to_shore(1.18e6), 30.8, 0.2);
}

TEST(Hardness, RoundTripAndMonotone) {
  double prev = 0.0;
  for (double s = 1.0; s < 99.0; s += 0.5) {
    const double e = shore_to_modulus(s);
    EXPECT_NEAR(modulus_to_shore(e), s, 1e-9);
    EXPECT_GT(e, prev);
    prev = e;
  }
  const double e35 = shore_to_modulus(35.0);
  EXPECT_GT(e35, shore_to_modulus(30.0));
  EXPECT_LT(e35, shore_to_modulus(40.0));
  EXPECT_GT(e35, 1.0e6);
  EXPECT_LT(e35, 2.0e6);
}

TEST(Hardness, OutOfRange) {
  EXPECT_FREELAB_ERROR(shore_to_modulus(0.0), out_of_range_hardness);
  EXPECT_FREELAB_ERROR(shore_to_modulus(100.0), out_of_range_hardness);
  EXPECT_FREELAB_ERROR(modulus_to_shore(-1.0), out_of_range_hardness);
}

TEST(ShearModulus, Examples) {
  EXPECT_NEAR(shear_from_youngs(1.18e6, 0.5), 0.393e6, 0.001e6);
  EXPECT_LT(rel_err(shear_from_youngs(1.18e6, 0.5), 1.18e6 / 3.0), 1e-15);
  EXPECT_EQ(shear_from_youngs(2.0, 0.0), 1.0);
  EXPECT_EQ(shear_from_youngs(0.0, 0.3), 0.0);
}

TEST(FitOgden, RoundTrip) {
  const auto data = synthetic(latex);
  const auto fit = fit_ogden(data, latex.mu);
  EXPECT_NEAR(fit.params.alpha, 1.2, 1e-4);
  EXPECT_LT(fit.rmsd, 1.0);
  EXPECT_LT(ogden_rmsd(data, latex), ogden_rmsd(data, {latex.mu, 0.8}));
  EXPECT_LT(ogden_rmsd(data, latex), ogden_rmsd(data, {latex.mu, 2.0}));
}

TEST(FitOgden, RecoversOtherExponents) {
  for (double a : {0.5, 1.7, 3.1}) {
    const auto fit = fit_ogden(synthetic({0.3e6, a}), 0.3e6);
    EXPECT_NEAR(fit.params.alpha, a, 1e-4);
  }
}

TEST(FitOgden, Errors) {
  const std::vector<StressStrainSample> one{{1.5, 1e5}};
  EXPECT_FREELAB_ERROR(fit_ogden(one, latex.mu), insufficient_data);
  const std::vector<StressStrainSample> compressive{{0.7, -1e5}, {0.8, -5e4}, {0.9, -2e4}};
  EXPECT_FREELAB_ERROR(fit_ogden(compressive, latex.mu), insufficient_data);
  // Generating exponent outside the search interval.
  EXPECT_FREELAB_ERROR(fit_ogden(synthetic({latex.mu, 3.5}), latex.mu, 0.1, 2.0),
                       no_minimum_in_interval);
}

TEST(FitLinear, ExactSlope) {
  std::vector<StressStrainSample> data;
  for (int i = -5; i <= 5; ++i) data.push_back({1.0 + 0.01 * i, 1.18e6 * 0.01 * i});
  EXPECT_LT(rel_err(fit_linear_modulus(data, 0.1).youngs_modulus, 1.18e6), 1e-12);
}

TEST(FitLinear, FiberRigidity) {
  std::vector<StressStrainSample> data;
  for (int i = 1; i <= 10; ++i) {
    const double strain = 0.005 * i;
    data.push_back({1.0 + strain, 644.0 * strain});
  }
  // Points past the cap are excluded.
  data.push_back({1.5, 1e6});
  EXPECT_LT(rel_err(fit_linear_modulus(data, 0.06).youngs_modulus, 644.0), 1e-12);
}

TEST(FitLinear, EmptyRegion) {
  const std::vector<StressStrainSample> data{{1.5, 1e5}, {2.0, 2e5}};
  EXPECT_FREELAB_ERROR(fit_linear_modulus(data, 0.1), insufficient_data);
}

TEST(Engineering, TrueStressConversion) {
  const std::vector<double> strain{0.0, 0.5, 1.0};
  const std::vector<double> eng{0.0, 1e5, 2e5};
  const auto s = from_engineering(strain, eng);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[1].stretch, 1.5);
  EXPECT_EQ(s[1].true_stress, 1.5e5);
  EXPECT_EQ(s[2].true_stress, 4e5);
}
