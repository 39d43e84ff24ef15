#include "freelab/materials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "freelab/error.hpp"

namespace freelab::materials {

namespace {

void require_positive_stretch(double stretch) {
  if (!(stretch > 0.0)) {
    throw Error(ErrorKind::non_positive_stretch,
                fmt::format("stretch {} must be > 0", stretch));
  }
}

constexpr double gent_a = 0.0981;
constexpr double gent_b = 56.0;
constexpr double gent_c = 7.62336;
constexpr double gent_d = 0.137505;
constexpr double gent_e = 254.0;
constexpr double gent_f = 2.54;

}  // namespace

void OgdenParams::validate() const {
  if (!(mu > 0.0)) throw Error(ErrorKind::invalid_argument, "Ogden mu must be > 0");
  if (alpha == 0.0 || !std::isfinite(alpha)) {
    throw Error(ErrorKind::invalid_argument, "Ogden alpha must be finite and nonzero");
  }
}

void NeoHookeanParams::validate() const {
  if (!(mu > 0.0)) throw Error(ErrorKind::invalid_argument, "neo-Hookean mu must be > 0");
}

void LinearParams::validate() const {
  if (!(youngs_modulus > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "Young's modulus must be > 0");
  }
}

void FiberParams::validate() const {
  if (!(axial_rigidity > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "fiber EA must be > 0");
  }
}

OgdenParams calibrated_latex_ogden() { return {0.393e6, 1.2}; }
LinearParams calibrated_latex_linear() { return {1.18e6}; }
FiberParams calibrated_cotton_fiber() { return {644.0}; }

double ogden_energy(double l1, double l2, double l3, const OgdenParams& p) {
  require_positive_stretch(l1);
  require_positive_stretch(l2);
  require_positive_stretch(l3);
  const double a = p.alpha;
  return 2.0 * p.mu / (a * a) *
         (std::pow(l1, a) + std::pow(l2, a) + std::pow(l3, a) - 3.0);
}

double neo_hookean_energy(double l1, double l2, double l3,
                          const NeoHookeanParams& p) {
  require_positive_stretch(l1);
  require_positive_stretch(l2);
  require_positive_stretch(l3);
  return 0.5 * p.mu * (l1 * l1 + l2 * l2 + l3 * l3 - 3.0);
}

double ogden_uniaxial_stress(double stretch, const OgdenParams& p) {
  require_positive_stretch(stretch);
  const double a = p.alpha;
  return 2.0 * p.mu / a * (std::pow(stretch, a) - std::pow(stretch, -0.5 * a));
}

double neo_hookean_uniaxial_stress(double stretch, const NeoHookeanParams& p) {
  require_positive_stretch(stretch);
  return p.mu * (stretch * stretch - 1.0 / stretch);
}

double linear_uniaxial_stress(double strain, const LinearParams& p) {
  return p.youngs_modulus * strain;
}

double shore_to_modulus(double shore_a) {
  if (!(shore_a > 0.0 && shore_a < 100.0)) {
    throw Error(ErrorKind::out_of_range_hardness,
                fmt::format("Shore A hardness {} outside (0, 100)", shore_a));
  }
  const double mpa = gent_a * (gent_b + gent_c * shore_a) /
                     (gent_d * (gent_e - gent_f * shore_a));
  return mpa * 1e6;
}

double modulus_to_shore(double youngs_modulus) {
  if (!(youngs_modulus > 0.0) || !std::isfinite(youngs_modulus)) {
    throw Error(ErrorKind::out_of_range_hardness,
                fmt::format("modulus {} Pa has no Shore A equivalent", youngs_modulus));
  }
  // Gent's relation is linear-fractional in S, so it inverts in closed form.
  const double e = youngs_modulus * 1e-6;
  const double shore = (e * gent_d * gent_e - gent_a * gent_b) /
                       (gent_a * gent_c + e * gent_d * gent_f);
  if (!(shore > 0.0 && shore < 100.0)) {
    throw Error(ErrorKind::out_of_range_hardness,
                fmt::format("modulus {} Pa maps to Shore A {} outside (0, 100)",
                            youngs_modulus, shore));
  }
  return shore;
}

double shear_from_youngs(double youngs_modulus, double poisson_ratio) {
  if (!(poisson_ratio > -1.0 && poisson_ratio <= 0.5)) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("Poisson ratio {} outside (-1, 0.5]", poisson_ratio));
  }
  if (youngs_modulus < 0.0) {
    throw Error(ErrorKind::invalid_argument, "Young's modulus must be >= 0");
  }
  return youngs_modulus / (2.0 * (1.0 + poisson_ratio));
}

double ogden_rmsd(std::span<const StressStrainSample> samples,
                  const OgdenParams& p) {
  if (samples.empty()) throw Error(ErrorKind::insufficient_data, "no samples");
  double sum = 0.0;
  for (const auto& s : samples) {
    const double d = ogden_uniaxial_stress(s.stretch, p) - s.true_stress;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

OgdenFit fit_ogden(std::span<const StressStrainSample> samples, double mu_fixed,
                   double alpha_min, double alpha_max) {
  if (samples.size() < 3) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("Ogden fit needs >= 3 samples, got {}", samples.size()));
  }
  const bool spans_tension = std::any_of(samples.begin(), samples.end(),
                                         [](const auto& s) { return s.stretch > 1.0; });
  if (!spans_tension) {
    throw Error(ErrorKind::insufficient_data, "Ogden fit needs samples with stretch > 1");
  }
  if (!(mu_fixed > 0.0)) throw Error(ErrorKind::invalid_argument, "mu must be > 0");
  if (!(alpha_max > alpha_min)) {
    throw Error(ErrorKind::invalid_argument, "empty alpha search interval");
  }

  auto cost = [&](double alpha) {
    if (alpha == 0.0) return std::numeric_limits<double>::infinity();
    return ogden_rmsd(samples, OgdenParams{mu_fixed, alpha});
  };

  constexpr int grid_points = 79;
  const double step = (alpha_max - alpha_min) / (grid_points - 1);
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double c = cost(alpha_min + step * i);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  if (best == 0 || best == grid_points - 1) {
    throw Error(ErrorKind::no_minimum_in_interval,
                fmt::format("RMSD minimum lies on the boundary of [{}, {}]",
                            alpha_min, alpha_max));
  }

  // Golden-section refinement on the bracketing grid cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = alpha_min + step * (best - 1);
  double b = alpha_min + step * (best + 1);
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = cost(x1);
  double f2 = cost(x2);
  while (b - a > 1e-10) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = cost(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = cost(x2);
    }
  }
  const double alpha = 0.5 * (a + b);
  return {OgdenParams{mu_fixed, alpha}, cost(alpha)};
}

LinearParams fit_linear_modulus(std::span<const StressStrainSample> samples,
                                double strain_cap) {
  double sxy = 0.0;
  double sxx = 0.0;
  std::size_t used = 0;
  for (const auto& s : samples) {
    const double strain = s.stretch - 1.0;
    if (strain == 0.0 || std::abs(strain) > strain_cap) continue;
    sxy += strain * s.true_stress;
    sxx += strain * strain;
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("no samples with 0 < |strain| <= {}", strain_cap));
  }
  return {sxy / sxx};
}

std::vector<StressStrainSample> from_engineering(std::span<const double> strain,
                                                 std::span<const double> eng_stress) {
  if (strain.size() != eng_stress.size()) {
    throw Error(ErrorKind::invalid_argument, "strain/stress column length mismatch");
  }
  std::vector<StressStrainSample> out;
  out.reserve(strain.size());
  for (std::size_t i = 0; i < strain.size(); ++i) {
    const double stretch = 1.0 + strain[i];
    require_positive_stretch(stretch);
    out.push_back({stretch, eng_stress[i] * stretch});
  }
  return out;
}

}  // namespace freelab::materials
