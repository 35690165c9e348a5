#pragma once

// Normalized isotropic vectors y in R^n with E{y_i} = 0 and
// E{y_i y_j} = delta_ij / n, their tensor products Y = y^(1) x ... x y^(k),
// and the fourth/sixth moment constants that drive the fluctuation formulas:
//
//   a_{2,2}   = E{y_i^2 y_j^2} = n^-2 + a n^-3 + O(n^-4),   i != j
//   kappa_4   = E{y_i^4} - 3 a_{2,2} = b n^-2 + O(n^-3)
//   a_{2,2,2} = E{y_i^2 y_j^2 y_k^2} = n^-3 + O(n^-4)
//
// Model families (all unconditional and exchangeable):
//   iid-even  components x_i / sqrt(n), x_i i.i.d. with an even unit-variance
//             law: gaussian, rademacher, symmetric uniform, or a bounded
//             heavy-tailed two-point scale mixture ("student-like")
//   sphere    uniform on the unit sphere; a = -2, b = 0, so a + b + 2 = 0
//   lp-ball   uniform on the unit l_p ball, rescaled to E{y_i^2} = 1/n;
//             moment constants are estimated empirically

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "tensormp/rng.hpp"

namespace tensormp {

enum class ComponentLaw { Gaussian, Rademacher, UniformSym, StudentLikeBounded };

struct VectorModel {
  enum class Kind { IidEven, Sphere, LpBall };

  Kind kind = Kind::IidEven;
  ComponentLaw law = ComponentLaw::Gaussian;
  double p = 2.0;  // lp-ball exponent

  static VectorModel iid(ComponentLaw law) { return {Kind::IidEven, law, 2.0}; }
  static VectorModel sphere() { return {Kind::Sphere, ComponentLaw::Gaussian, 2.0}; }
  static VectorModel lp_ball(double p) { return {Kind::LpBall, ComponentLaw::Gaussian, p}; }

  std::string name() const;
};

// Fourth and sixth moments of the unit-variance component law (before the
// 1/sqrt(n) scaling).
double component_fourth_moment(ComponentLaw law);
double component_sixth_moment(ComponentLaw law);

struct MomentProfile {
  double a22 = 0.0;
  double kappa4 = 0.0;
  double a222 = 0.0;
  double a24 = 0.0;
  double a6 = 0.0;
  double a = 0.0;  // n^3 (a22 - n^-2) -> a
  double b = 0.0;  // n^2 kappa4 -> b
  double se_a22 = 0.0, se_kappa4 = 0.0, se_a222 = 0.0, se_a24 = 0.0, se_a6 = 0.0;
  double se_a = 0.0, se_b = 0.0;
  // Empirical sup over a fixed probe set of n Var{(H y, y)} / ||H||^2; a
  // diagnostic for the bilinear concentration condition, not a certified
  // bound.  Zero for analytic profiles.
  double deltan_estimate = 0.0;
  bool analytic = false;
  std::size_t reps = 0;
};

// One draw from the model.  n >= 2; lp-ball requires p >= 1.
Eigen::VectorXd sample_vector(const VectorModel& model, Eigen::Index n,
                              PhiloxStream& stream);

inline constexpr std::size_t kDefaultTensorBudget = std::size_t{1} << 24;

// Y = y^(1) x ... x y^(k) with independent factors; component at multi-index
// (j_1, ..., j_k) is the product of factor components, j_1 slowest.
Eigen::VectorXd tensor_sample(const VectorModel& model, Eigen::Index n, int k,
                              PhiloxStream& stream,
                              std::size_t max_components = kDefaultTensorBudget);

// Exact finite-n moments where closed forms exist (iid-even, sphere);
// nullopt for lp-ball, which is estimated empirically only.
std::optional<MomentProfile> analytic_moment_profile(const VectorModel& model,
                                                     Eigen::Index n);

// Monte Carlo estimates of the defining expectations with standard errors
// (delete-1 jackknife; exact for these linear statistics).  reps >= 1e4.
MomentProfile empirical_moment_profile(const VectorModel& model, Eigen::Index n,
                                       std::size_t reps, std::uint64_t seed,
                                       int threads = 1);

}  // namespace tensormp
