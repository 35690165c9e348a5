#pragma once

// Test functions for linear eigenvalue statistics, Poisson smoothing, and the
// Sobolev norm
//
//   ||phi||_s^2 = integral (1 + |t|)^{2s} |phi_hat(t)|^2 dt,
//   phi_hat(t)  = integral e^{i t theta} phi(theta) dtheta.
//
// Built-in kinds:
//   gaussian-bump(c, w)              exp(-(x - c)^2 / (2 w^2))
//   poisson-smoothed-indicator       P_eta * 1_{[lo, hi]}, closed arctan form
//   cauchy(c, g)                     g / (pi ((x - c)^2 + g^2))
//   monomial(d, [lo, hi])            x^d inside the window, cosine taper to 0
//                                    over one unit on each side (d <= 2); an
//                                    untapered variant exists as a test hook
//
// The cosine taper is C^1 only, so a tapered monomial has finite H_s norm
// for s < 3/2; where the statistics need s > 5/2 the monomial serves as a
// testing device that coincides with the identity on the spectral support.

#include <functional>
#include <optional>
#include <string>

namespace tensormp {

class TestFunction {
 public:
  enum class Kind {
    GaussianBump,
    PoissonIndicator,
    Cauchy,
    Monomial,
    Custom,
  };

  struct Params {
    double center = 0.0;
    double width = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double eta = 0.0;
    double scale = 0.0;
    int degree = 0;
    bool tapered = true;
  };

  static TestFunction gaussian_bump(double center, double width);
  static TestFunction poisson_smoothed_indicator(double lo, double hi, double eta);
  static TestFunction cauchy(double center, double scale);
  static TestFunction monomial(int degree, double lo, double hi);
  static TestFunction monomial_untapered(int degree);
  static TestFunction constant(double value);
  static TestFunction custom(std::string name, std::function<double(double)> fn,
                             bool sobolev_ok, bool decays, double core_lo,
                             double core_hi);

  double operator()(double x) const { return eval_(x); }

  Kind kind() const { return kind_; }
  const Params& params() const { return params_; }
  const std::string& name() const { return name_; }
  bool sobolev_ok() const { return sobolev_ok_; }
  bool decays() const { return decays_; }

  // Interval outside which the function is negligible (wide bounds; used to
  // size quadrature windows).  Non-decaying kinds return +-inf.
  double core_lo() const { return core_lo_; }
  double core_hi() const { return core_hi_; }

  // |phi_hat(t)|^2 where a closed form exists (gaussian, cauchy, smoothed
  // indicator); nullopt otherwise.
  std::optional<double> spectral_power(double t) const;

  TestFunction scaled(double factor) const;

 private:
  TestFunction() = default;

  Kind kind_ = Kind::Custom;
  Params params_;
  std::string name_;
  std::function<double(double)> eval_;
  bool sobolev_ok_ = false;
  bool decays_ = false;
  double core_lo_ = 0.0;
  double core_hi_ = 0.0;
  double scale_factor_ = 1.0;
};

// Poisson smoothing (P_eta * phi)(x) with P_eta(x) = eta / (pi (x^2 + eta^2)).
// Evaluated by adaptive quadrature in the substituted variable t = x + eta
// tan(theta); constants are fixed points of the kernel.
TestFunction poisson_smooth(const TestFunction& phi, double eta);

// Sobolev norm ||phi||_s.  Uses the analytic transform when available and a
// discrete transform on a wide grid otherwise.  Throws std::domain_error for
// non-decaying phi and for tapered monomials at s >= 3/2 (where the norm
// diverges).
double sobolev_norm(const TestFunction& phi, double s);

}  // namespace tensormp
