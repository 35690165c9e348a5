#include "tensormp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tensormp {

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("sample_mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: need >= 2 samples");
  const double m = sample_mean(xs);
  double s2 = 0.0;
  for (double x : xs) s2 += (x - m) * (x - m);
  return s2 / static_cast<double>(xs.size() - 1);
}

MomentSummary moment_summary(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("moment_summary: need >= 2 samples");
  MomentSummary out;
  out.count = xs.size();
  out.mean = sample_mean(xs);
  const double n = static_cast<double>(xs.size());
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - out.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  out.variance = m2 / (n - 1.0);
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 0.0) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return out;
}

double jackknife_se(std::size_t rows, std::size_t dim, const double* data,
                    const std::function<double(std::span<const double>)>& statistic) {
  if (rows < 2) throw std::invalid_argument("jackknife_se: need >= 2 rows");
  std::vector<double> sums(dim, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t d = 0; d < dim; ++d) sums[d] += data[r * dim + d];
  }
  const double nm1 = static_cast<double>(rows - 1);
  std::vector<double> loo(dim, 0.0);
  std::vector<double> thetas(rows, 0.0);
  double theta_bar = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t d = 0; d < dim; ++d) {
      loo[d] = (sums[d] - data[r * dim + d]) / nm1;
    }
    thetas[r] = statistic(loo);
    theta_bar += thetas[r];
  }
  theta_bar /= static_cast<double>(rows);
  double ss = 0.0;
  for (double t : thetas) ss += (t - theta_bar) * (t - theta_bar);
  return std::sqrt(nm1 / static_cast<double>(rows) * ss);
}

double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.size() < 2) throw std::invalid_argument("ks_statistic: need >= 2 samples");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;  // tie block
    const double before = static_cast<double>(i) / n;
    const double after = static_cast<double>(j) / n;
    const double f_right = cdf(xs[i]);
    const double f_left =
        cdf(std::nextafter(xs[i], -std::numeric_limits<double>::infinity()));
    d = std::max({d, std::abs(f_left - before), std::abs(f_right - after)});
    i = j;
  }
  return d;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("linear_fit: need matched samples, >= 2 points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.slope * x[i] + fit.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace tensormp
