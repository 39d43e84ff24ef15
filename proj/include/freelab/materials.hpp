#pragma once

#include <span>
#include <vector>

// Elastomer and fiber constitutive models: linear, neo-Hookean and
// first-order Ogden, with uniaxial calibration helpers and the Gent
// Shore A hardness relation.

namespace freelab::materials {

struct OgdenParams {
  double mu = 0.0;     // initial shear modulus [Pa]
  double alpha = 0.0;  // nonlinearity exponent
  void validate() const;
};

struct NeoHookeanParams {
  double mu = 0.0;  // [Pa]
  void validate() const;
};

struct LinearParams {
  double youngs_modulus = 0.0;  // [Pa]
  void validate() const;
};

struct FiberParams {
  double axial_rigidity = 0.0;  // EA [N per unit strain]
  void validate() const;
};

struct StressStrainSample {
  double stretch = 1.0;      // lambda
  double true_stress = 0.0;  // [Pa]
};

// Calibrated latex: mu = 0.393 MPa, alpha = 1.2, E = 1.18 MPa, fiber EA = 644 N.
OgdenParams calibrated_latex_ogden();
LinearParams calibrated_latex_linear();
FiberParams calibrated_cotton_fiber();

double ogden_energy(double l1, double l2, double l3, const OgdenParams& p);
double neo_hookean_energy(double l1, double l2, double l3,
                          const NeoHookeanParams& p);

// Incompressible uniaxial tension, true (Cauchy) stress.
double ogden_uniaxial_stress(double stretch, const OgdenParams& p);
double neo_hookean_uniaxial_stress(double stretch, const NeoHookeanParams& p);
double linear_uniaxial_stress(double strain, const LinearParams& p);

// Gent (1958): E[MPa] = 0.0981 (56 + 7.62336 S) / (0.137505 (254 - 2.54 S)).
double shore_to_modulus(double shore_a);
double modulus_to_shore(double youngs_modulus);

double shear_from_youngs(double youngs_modulus, double poisson_ratio);

struct OgdenFit {
  OgdenParams params;
  double rmsd = 0.0;  // [Pa]
};

/// RMS deviation between the Ogden uniaxial stress and the samples.
double ogden_rmsd(std::span<const StressStrainSample> samples,
                  const OgdenParams& p);

/// Fits alpha with mu held fixed. The search covers [alpha_min, alpha_max]
/// with a coarse grid followed by golden-section refinement.
OgdenFit fit_ogden(std::span<const StressStrainSample> samples, double mu_fixed,
                   double alpha_min = 0.1, double alpha_max = 4.0);

/// Least-squares slope through the origin over samples with
/// 0 < |stretch - 1| <= strain_cap.
LinearParams fit_linear_modulus(std::span<const StressStrainSample> samples,
                                double strain_cap);

/// Converts engineering stress to true stress assuming incompressibility.
std::vector<StressStrainSample> from_engineering(
    std::span<const double> strain, std::span<const double> eng_stress);

}  // namespace freelab::materials
