#include "tensormp/test_function.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tensormp/common.hpp"
#include "tensormp/quadrature.hpp"

namespace tensormp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// C^1 cosine ramp over one unit outside [lo, hi]: 1 inside, 0 beyond.
double taper_weight(double x, double lo, double hi) {
  if (x >= lo && x <= hi) return 1.0;
  if (x <= lo - 1.0 || x >= hi + 1.0) return 0.0;
  const double d = x < lo ? lo - x : x - hi;
  return 0.5 * (1.0 + std::cos(kPi * d));
}

}  // namespace

TestFunction TestFunction::gaussian_bump(double center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump: width <= 0");
  TestFunction f;
  f.kind_ = Kind::GaussianBump;
  f.params_.center = center;
  f.params_.width = width;
  f.name_ = "gaussian-bump(" + fmt(center) + "," + fmt(width) + ")";
  f.eval_ = [center, width](double x) {
    const double u = (x - center) / width;
    return std::exp(-0.5 * u * u);
  };
  f.sobolev_ok_ = true;
  f.decays_ = true;
  const double reach = width * 9.0;  // exp(-40.5) ~ 2e-18
  f.core_lo_ = center - reach;
  f.core_hi_ = center + reach;
  return f;
}

TestFunction TestFunction::poisson_smoothed_indicator(double lo, double hi,
                                                      double eta) {
  if (!(hi > lo)) throw std::invalid_argument("poisson_smoothed_indicator: hi <= lo");
  if (!(eta > 0.0)) throw std::invalid_argument("poisson_smoothed_indicator: eta <= 0");
  TestFunction f;
  f.kind_ = Kind::PoissonIndicator;
  f.params_.lo = lo;
  f.params_.hi = hi;
  f.params_.eta = eta;
  f.name_ = "poisson-indicator(" + fmt(lo) + "," + fmt(hi) + "," + fmt(eta) + ")";
  f.eval_ = [lo, hi, eta](double x) {
    return (std::atan((hi - x) / eta) - std::atan((lo - x) / eta)) / kPi;
  };
  f.sobolev_ok_ = true;
  f.decays_ = true;
  // Tail value ~ eta (hi - lo) / (pi d^2); reach for a 1e-10 cutoff.
  const double reach = std::sqrt(eta * (hi - lo) / (kPi * 1e-10));
  f.core_lo_ = lo - reach;
  f.core_hi_ = hi + reach;
  return f;
}

TestFunction TestFunction::cauchy(double center, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("cauchy: scale <= 0");
  TestFunction f;
  f.kind_ = Kind::Cauchy;
  f.params_.center = center;
  f.params_.width = scale;
  f.name_ = "cauchy(" + fmt(center) + "," + fmt(scale) + ")";
  f.eval_ = [center, scale](double x) {
    const double d = x - center;
    return scale / (kPi * (d * d + scale * scale));
  };
  f.sobolev_ok_ = true;
  f.decays_ = true;
  const double reach = std::sqrt(scale / (kPi * 1e-10));
  f.core_lo_ = center - reach;
  f.core_hi_ = center + reach;
  return f;
}

TestFunction TestFunction::monomial(int degree, double lo, double hi) {
  if (degree < 0 || degree > 2) throw std::invalid_argument("monomial: degree outside [0, 2]");
  if (!(hi > lo)) throw std::invalid_argument("monomial: hi <= lo");
  TestFunction f;
  f.kind_ = Kind::Monomial;
  f.params_.degree = degree;
  f.params_.lo = lo;
  f.params_.hi = hi;
  f.params_.tapered = true;
  f.name_ = "monomial(" + std::to_string(degree) + ",[" + fmt(lo) + "," + fmt(hi) + "])";
  f.eval_ = [degree, lo, hi](double x) {
    const double w = taper_weight(x, lo, hi);
    if (w == 0.0) return 0.0;
    return std::pow(x, degree) * w;
  };
  f.sobolev_ok_ = false;  // C^1 taper: finite H_s only for s < 3/2
  f.decays_ = true;
  f.core_lo_ = lo - 1.0;
  f.core_hi_ = hi + 1.0;
  return f;
}

TestFunction TestFunction::monomial_untapered(int degree) {
  if (degree < 0 || degree > 2) throw std::invalid_argument("monomial: degree outside [0, 2]");
  TestFunction f;
  f.kind_ = Kind::Monomial;
  f.params_.degree = degree;
  f.params_.tapered = false;
  f.name_ = "monomial(" + std::to_string(degree) + ",untapered)";
  f.eval_ = [degree](double x) { return std::pow(x, degree); };
  f.sobolev_ok_ = false;
  f.decays_ = false;
  f.core_lo_ = -kInf;
  f.core_hi_ = kInf;
  return f;
}

TestFunction TestFunction::constant(double value) {
  TestFunction f;
  f.kind_ = Kind::Custom;
  f.name_ = "constant(" + fmt(value) + ")";
  f.eval_ = [value](double) { return value; };
  f.sobolev_ok_ = value == 0.0;
  f.decays_ = value == 0.0;
  f.core_lo_ = value == 0.0 ? -1.0 : -kInf;
  f.core_hi_ = value == 0.0 ? 1.0 : kInf;
  return f;
}

TestFunction TestFunction::custom(std::string name,
                                  std::function<double(double)> fn,
                                  bool sobolev_ok, bool decays, double core_lo,
                                  double core_hi) {
  TestFunction f;
  f.kind_ = Kind::Custom;
  f.name_ = std::move(name);
  f.eval_ = std::move(fn);
  f.sobolev_ok_ = sobolev_ok;
  f.decays_ = decays;
  f.core_lo_ = core_lo;
  f.core_hi_ = core_hi;
  return f;
}

std::optional<double> TestFunction::spectral_power(double t) const {
  const double s2 = scale_factor_ * scale_factor_;
  switch (kind_) {
    case Kind::GaussianBump: {
      const double w = params_.width;
      return s2 * 2.0 * kPi * w * w * std::exp(-w * w * t * t);
    }
    case Kind::Cauchy:
      return s2 * std::exp(-2.0 * params_.width * std::abs(t));
    case Kind::PoissonIndicator: {
      const double delta = params_.hi - params_.lo;
      const double box = t == 0.0 ? delta * delta
                                  : 4.0 * std::pow(std::sin(0.5 * t * delta) / t, 2);
      return s2 * box * std::exp(-2.0 * params_.eta * std::abs(t));
    }
    default:
      return std::nullopt;
  }
}

TestFunction TestFunction::scaled(double factor) const {
  TestFunction f = *this;
  auto base = eval_;
  f.eval_ = [base, factor](double x) { return factor * base(x); };
  f.scale_factor_ = scale_factor_ * factor;
  f.name_ = fmt(factor) + "*" + name_;
  return f;
}

TestFunction poisson_smooth(const TestFunction& phi, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("poisson_smooth: eta <= 0");
  auto base = phi;
  std::string name = "P_" + fmt(eta) + "*" + phi.name();
  auto eval = [base, eta](double x) {
    // (P_eta * phi)(x) = (1/pi) integral phi(x + eta tan(theta)) dtheta.
    const double margin = 1e-9;
    auto integrand = [&](double theta) { return base(x + eta * std::tan(theta)); };
    const auto q = integrate_adaptive(integrand, -0.5 * kPi + margin,
                                      0.5 * kPi - margin, 1e-11);
    return q.value / kPi;
  };
  return TestFunction::custom(std::move(name), std::move(eval),
                              /*sobolev_ok=*/phi.sobolev_ok() || phi.decays(),
                              phi.decays(),
                              phi.core_lo() == -kInf ? -kInf
                                                     : phi.core_lo() - 50.0 * eta,
                              phi.core_hi() == kInf ? kInf
                                                    : phi.core_hi() + 50.0 * eta);
}

namespace {

// integral_0^T (1 + t)^{2s} S(t) dt by adaptive panels on doubling segments.
double weighted_tail_integral(const std::function<double(double)>& spectral,
                              double s, double t_max) {
  double total = 0.0;
  double a = 0.0;
  double b = 1.0;
  while (a < t_max) {
    b = std::min(b, t_max);
    auto f = [&](double t) { return std::pow(1.0 + t, 2.0 * s) * spectral(t); };
    total += integrate_adaptive(f, a, b, 1e-14 * (1.0 + std::abs(total))).value;
    a = b;
    b *= 2.0;
  }
  return total;
}

}  // namespace

double sobolev_norm(const TestFunction& phi, double s) {
  if (!phi.decays()) throw std::domain_error("sobolev_norm: phi not in H_s (no decay)");
  if (phi.kind() == TestFunction::Kind::Monomial && s >= 1.5) {
    throw std::domain_error(
        "sobolev_norm: cosine-tapered monomial is C^1; the H_s norm diverges for s >= 3/2");
  }
  if (phi.spectral_power(0.0)) {
    // Analytic |phi_hat|^2: march out until the weighted integrand is dead.
    auto spec = [&phi](double t) { return *phi.spectral_power(t); };
    double t_max = 1.0;
    double peak = 0.0;
    for (;;) {
      const double w = std::pow(1.0 + t_max, 2.0 * s) * spec(t_max);
      peak = std::max(peak, w);
      if (w < 1e-18 * (peak + 1e-300) || t_max > 1e7) break;
      t_max *= 2.0;
    }
    return std::sqrt(2.0 * weighted_tail_integral(spec, s, t_max));
  }
  // Discrete transform on the compact core; phi_hat by Simpson on a fine grid.
  const double lo = phi.core_lo();
  const double hi = phi.core_hi();
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw std::domain_error("sobolev_norm: cannot bound the support of phi");
  }
  const int grid = 8192;
  const double h = (hi - lo) / grid;
  std::vector<double> values(grid + 1);
  for (int i = 0; i <= grid; ++i) values[i] = phi(lo + i * h);
  auto transform_power = [&](double t) {
    double re = 0.0, im = 0.0;
    for (int i = 0; i <= grid; ++i) {
      const double w = (i == 0 || i == grid) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      const double theta = lo + i * h;
      re += w * values[i] * std::cos(t * theta);
      im += w * values[i] * std::sin(t * theta);
    }
    re *= h / 3.0;
    im *= h / 3.0;
    return re * re + im * im;
  };
  // The grid resolves oscillations up to roughly pi / (4h).
  const double t_max = 0.25 * kPi / h;
  return std::sqrt(2.0 * weighted_tail_integral(transform_power, s, t_max));
}

}  // namespace tensormp
