#include "tensormp/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tensormp/common.hpp"

namespace tensormp {

namespace {

struct SimpsonState {
  const std::function<double(double)>* f;
  long evaluations;
  bool converged;
};

double simpson_recurse(SimpsonState& st, double a, double m, double b,
                       double fa, double fm, double fb, double whole,
                       double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm);
  const double frm = (*st.f)(rm);
  st.evaluations += 2;
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || depth <= 0) {
    if (depth <= 0 && std::abs(delta) > 15.0 * tol) st.converged = false;
    return left + right + delta / 15.0;
  }
  return simpson_recurse(st, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(st, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  SimpsonState st{&f, 0, true};
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  st.evaluations = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  out.value = simpson_recurse(st, a, m, b, fa, fm, fb, whole, abs_tol, max_depth);
  out.error_estimate = abs_tol;
  out.converged = st.converged;
  out.evaluations = st.evaluations;
  return out;
}

double gauss_chebyshev_edge(const std::function<double(double)>& g, double lo,
                            double hi, double rel_tol, int max_nodes) {
  if (!(hi > lo)) throw std::invalid_argument("gauss_chebyshev_edge: hi <= lo");
  const double mid = 0.5 * (lo + hi);
  const double rad = 0.5 * (hi - lo);
  auto rule = [&](int nodes) {
    double s = 0.0;
    for (int j = 0; j < nodes; ++j) {
      const double theta = kPi * (static_cast<double>(j) + 0.5) / nodes;
      s += g(mid + rad * std::cos(theta));
    }
    return kPi / nodes * s;
  };
  double prev = rule(64);
  for (int nodes = 128; nodes <= max_nodes; nodes *= 2) {
    const double cur = rule(nodes);
    if (std::abs(cur - prev) <= rel_tol * (std::abs(cur) + 1e-300)) return cur;
    prev = cur;
  }
  return prev;
}

double extrapolate_to_zero(std::span<const double> xs,
                           std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw std::invalid_argument("extrapolate_to_zero: size mismatch or empty");
  }
  std::vector<double> p(ys.begin(), ys.end());
  const std::size_t n = xs.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double x0 = xs[i];
      const double x1 = xs[i + level];
      p[i] = (x0 * p[i + 1] - x1 * p[i]) / (x0 - x1);
    }
  }
  return p[0];
}

}  // namespace tensormp
