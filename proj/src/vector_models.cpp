#include "tensormp/vector_models.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tensormp/parallel.hpp"

namespace tensormp {

namespace {

// Bounded heavy-tailed surrogate: two-point scale mixture with unit variance,
// light scale 1/3 (p = 0.9) and heavy scale 3 (p = 0.1).  All moments exist;
// excess kurtosis is m4 - 3 = 46/9.
constexpr double kMixHeavyProb = 0.1;
constexpr double kMixLight = 1.0 / 3.0;
constexpr double kMixHeavy = 3.0;

double sample_component(ComponentLaw law, PhiloxStream& stream) {
  switch (law) {
    case ComponentLaw::Gaussian:
      return stream.next_gaussian();
    case ComponentLaw::Rademacher:
      return (stream.next_u64() >> 63) ? 1.0 : -1.0;
    case ComponentLaw::UniformSym:
      return (2.0 * stream.next_double() - 1.0) * std::sqrt(3.0);
    case ComponentLaw::StudentLikeBounded: {
      const double u = stream.next_double();
      if (u < 0.5 * kMixHeavyProb) return -kMixHeavy;
      if (u < kMixHeavyProb) return kMixHeavy;
      if (u < 0.5 * (1.0 + kMixHeavyProb)) return -kMixLight;
      return kMixLight;
    }
  }
  throw std::logic_error("sample_component: bad law");
}

// E{x_1^2} for x uniform on the unit l_p ball in R^n (Dirichlet moment).
double lp_ball_component_second_moment(double p, Eigen::Index n) {
  const double nd = static_cast<double>(n);
  const double log_e = std::lgamma(3.0 / p) + std::lgamma(nd / p + 1.0) -
                       std::lgamma(1.0 / p) - std::lgamma((nd + 2.0) / p + 1.0);
  return std::exp(log_e);
}

}  // namespace

std::string VectorModel::name() const {
  switch (kind) {
    case Kind::Sphere:
      return "sphere";
    case Kind::LpBall:
      return "lp(" + std::to_string(p) + ")";
    case Kind::IidEven:
      switch (law) {
        case ComponentLaw::Gaussian:
          return "iid-gaussian";
        case ComponentLaw::Rademacher:
          return "iid-rademacher";
        case ComponentLaw::UniformSym:
          return "iid-uniform";
        case ComponentLaw::StudentLikeBounded:
          return "iid-student";
      }
  }
  return "unknown";
}

double component_fourth_moment(ComponentLaw law) {
  switch (law) {
    case ComponentLaw::Gaussian:
      return 3.0;
    case ComponentLaw::Rademacher:
      return 1.0;
    case ComponentLaw::UniformSym:
      return 9.0 / 5.0;
    case ComponentLaw::StudentLikeBounded:
      return (1.0 - kMixHeavyProb) * std::pow(kMixLight, 4) +
             kMixHeavyProb * std::pow(kMixHeavy, 4);
  }
  throw std::logic_error("component_fourth_moment: bad law");
}

double component_sixth_moment(ComponentLaw law) {
  switch (law) {
    case ComponentLaw::Gaussian:
      return 15.0;
    case ComponentLaw::Rademacher:
      return 1.0;
    case ComponentLaw::UniformSym:
      return 27.0 / 7.0;
    case ComponentLaw::StudentLikeBounded:
      return (1.0 - kMixHeavyProb) * std::pow(kMixLight, 6) +
             kMixHeavyProb * std::pow(kMixHeavy, 6);
  }
  throw std::logic_error("component_sixth_moment: bad law");
}

Eigen::VectorXd sample_vector(const VectorModel& model, Eigen::Index n,
                              PhiloxStream& stream) {
  if (n < 2) throw std::invalid_argument("sample_vector: n < 2");
  Eigen::VectorXd y(n);
  switch (model.kind) {
    case VectorModel::Kind::IidEven: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        y[i] = scale * sample_component(model.law, stream);
      }
      return y;
    }
    case VectorModel::Kind::Sphere: {
      for (Eigen::Index i = 0; i < n; ++i) y[i] = stream.next_gaussian();
      y /= y.norm();
      return y;
    }
    case VectorModel::Kind::LpBall: {
      const double p = model.p;
      if (!(p >= 1.0)) throw std::invalid_argument("sample_vector: lp-ball needs p >= 1");
      // Gamma/exponential representation of the uniform law on B_p^n:
      // |g_i|^p ~ Gamma(1/p), w ~ Exp(1), x = g / (sum |g_i|^p + w)^{1/p}.
      double sum_p = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double gp = stream.next_gamma(1.0 / p);
        const double sign = (stream.next_u64() >> 63) ? 1.0 : -1.0;
        y[i] = sign * std::pow(gp, 1.0 / p);
        sum_p += gp;
      }
      const double w = stream.next_exponential();
      const double denom = std::pow(sum_p + w, 1.0 / p);
      const double scale =
          1.0 / std::sqrt(static_cast<double>(n) *
                          lp_ball_component_second_moment(p, n));
      y = y * (scale / denom);
      return y;
    }
  }
  throw std::logic_error("sample_vector: bad kind");
}

Eigen::VectorXd tensor_sample(const VectorModel& model, Eigen::Index n, int k,
                              PhiloxStream& stream, std::size_t max_components) {
  if (k < 1) throw std::invalid_argument("tensor_sample: k < 1");
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) {
    total *= static_cast<std::size_t>(n);
    if (total > max_components) {
      throw std::invalid_argument(
          "tensor_sample: n^k exceeds the memory budget; use the matrix-free "
          "apply path instead of materializing tensors");
    }
  }
  Eigen::VectorXd out = sample_vector(model, n, stream);
  for (int factor = 1; factor < k; ++factor) {
    const Eigen::VectorXd y = sample_vector(model, n, stream);
    Eigen::VectorXd next(out.size() * n);
    for (Eigen::Index a = 0; a < out.size(); ++a) {
      next.segment(a * n, n) = out[a] * y;
    }
    out.swap(next);
  }
  return out;
}

std::optional<MomentProfile> analytic_moment_profile(const VectorModel& model,
                                                     Eigen::Index n) {
  if (n < 2) throw std::invalid_argument("analytic_moment_profile: n < 2");
  const double nd = static_cast<double>(n);
  MomentProfile prof;
  prof.analytic = true;
  switch (model.kind) {
    case VectorModel::Kind::IidEven: {
      const double m4 = component_fourth_moment(model.law);
      const double m6 = component_sixth_moment(model.law);
      prof.a22 = 1.0 / (nd * nd);  // independence: exactly n^-2, so a = 0
      prof.kappa4 = (m4 - 3.0) / (nd * nd);
      prof.a222 = 1.0 / (nd * nd * nd);
      prof.a24 = m4 / (nd * nd * nd);
      prof.a6 = m6 / (nd * nd * nd);
      prof.a = 0.0;
      prof.b = m4 - 3.0;
      return prof;
    }
    case VectorModel::Kind::Sphere: {
      // y_i^2 jointly Dirichlet(1/2, ..., 1/2).
      const double d3 = nd * (nd + 2.0) * (nd + 4.0);
      prof.a22 = 1.0 / (nd * (nd + 2.0));
      prof.kappa4 = 0.0;  // E{y_i^4} = 3/(n(n+2)) = 3 a22 exactly
      prof.a222 = 1.0 / d3;
      prof.a24 = 3.0 / d3;
      prof.a6 = 15.0 / d3;
      prof.a = -2.0;
      prof.b = 0.0;
      return prof;
    }
    case VectorModel::Kind::LpBall:
      return std::nullopt;  // empirical only
  }
  throw std::logic_error("analytic_moment_profile: bad kind");
}

namespace {

constexpr int kNumStats = 5;   // p22, p4, p222, p24, p6
constexpr int kNumProbes = 5;  // identity, alternating diag, reversal, e1 proj, shift

struct Accumulator {
  double stat_sum[kNumStats] = {};
  double stat_sq[kNumStats] = {};
  double cross_4_22 = 0.0;
  double probe_sum[kNumProbes] = {};
  double probe_sq[kNumProbes] = {};

  void add(const double* stats, const double* probes) {
    for (int j = 0; j < kNumStats; ++j) {
      stat_sum[j] += stats[j];
      stat_sq[j] += stats[j] * stats[j];
    }
    cross_4_22 += stats[1] * stats[0];
    for (int j = 0; j < kNumProbes; ++j) {
      probe_sum[j] += probes[j];
      probe_sq[j] += probes[j] * probes[j];
    }
  }

  void merge(const Accumulator& other) {
    for (int j = 0; j < kNumStats; ++j) {
      stat_sum[j] += other.stat_sum[j];
      stat_sq[j] += other.stat_sq[j];
    }
    cross_4_22 += other.cross_4_22;
    for (int j = 0; j < kNumProbes; ++j) {
      probe_sum[j] += other.probe_sum[j];
      probe_sq[j] += other.probe_sq[j];
    }
  }
};

void replicate_moments(const Eigen::VectorXd& y, double* stats, double* probes) {
  const Eigen::Index n = y.size();
  double s2 = 0.0, s4 = 0.0, s6 = 0.0;
  double alt = 0.0, rev = 0.0, shift = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = y[i];
    const double v2 = v * v;
    s2 += v2;
    s4 += v2 * v2;
    s6 += v2 * v2 * v2;
    alt += (i % 2 == 0 ? v2 : -v2);
    rev += v * y[n - 1 - i];
    shift += v * y[(i + 1) % n];
  }
  const double nd = static_cast<double>(n);
  stats[0] = (s2 * s2 - s4) / (nd * (nd - 1.0));                          // pairs
  stats[1] = s4 / nd;                                                     // E y^4
  stats[2] = (s2 * s2 * s2 - 3.0 * s2 * s4 + 2.0 * s6) /
             (nd * (nd - 1.0) * (nd - 2.0));                              // triples
  stats[3] = (s2 * s4 - s6) / (nd * (nd - 1.0));                          // a_{2,4}
  stats[4] = s6 / nd;                                                     // E y^6
  probes[0] = s2;
  probes[1] = alt;
  probes[2] = rev;
  probes[3] = y[0] * y[0];
  probes[4] = shift;
}

}  // namespace

MomentProfile empirical_moment_profile(const VectorModel& model, Eigen::Index n,
                                       std::size_t reps, std::uint64_t seed,
                                       int threads) {
  if (n < 3) throw std::invalid_argument("empirical_moment_profile: n < 3");
  if (reps < 10000) {
    throw std::invalid_argument("empirical_moment_profile: reps < 1e4");
  }
  // Fixed-size chunks accumulated serially and merged in chunk order keep the
  // result identical for every thread count.
  constexpr std::size_t kChunk = 4096;
  const std::size_t num_chunks = (reps + kChunk - 1) / kChunk;
  std::vector<Accumulator> partials(num_chunks);
  for_each_index(num_chunks, threads, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kChunk;
    const std::size_t end = std::min(reps, begin + kChunk);
    Accumulator acc;
    double stats[kNumStats];
    double probes[kNumProbes];
    for (std::size_t r = begin; r < end; ++r) {
      PhiloxStream stream = derive_stream(seed, r);
      const Eigen::VectorXd y = sample_vector(model, n, stream);
      replicate_moments(y, stats, probes);
      acc.add(stats, probes);
    }
    partials[chunk] = acc;
  });
  Accumulator total;
  for (const auto& part : partials) total.merge(part);

  const double R = static_cast<double>(reps);
  const double nd = static_cast<double>(n);
  double mean[kNumStats], var[kNumStats];
  for (int j = 0; j < kNumStats; ++j) {
    mean[j] = total.stat_sum[j] / R;
    var[j] = (total.stat_sq[j] - R * mean[j] * mean[j]) / (R - 1.0);
    var[j] = std::max(var[j], 0.0);
  }
  const double cov_4_22 = (total.cross_4_22 - R * mean[1] * mean[0]) / (R - 1.0);

  MomentProfile prof;
  prof.analytic = false;
  prof.reps = reps;
  prof.a22 = mean[0];
  prof.kappa4 = mean[1] - 3.0 * mean[0];
  prof.a222 = mean[2];
  prof.a24 = mean[3];
  prof.a6 = mean[4];
  prof.a = nd * nd * nd * (prof.a22 - 1.0 / (nd * nd));
  prof.b = nd * nd * prof.kappa4;
  prof.se_a22 = std::sqrt(var[0] / R);
  prof.se_kappa4 =
      std::sqrt(std::max(var[1] + 9.0 * var[0] - 6.0 * cov_4_22, 0.0) / R);
  prof.se_a222 = std::sqrt(var[2] / R);
  prof.se_a24 = std::sqrt(var[3] / R);
  prof.se_a6 = std::sqrt(var[4] / R);
  prof.se_a = nd * nd * nd * prof.se_a22;
  prof.se_b = nd * nd * prof.se_kappa4;

  double deltan = 0.0;
  for (int j = 0; j < kNumProbes; ++j) {
    const double pm = total.probe_sum[j] / R;
    const double pv =
        std::max((total.probe_sq[j] - R * pm * pm) / (R - 1.0), 0.0);
    deltan = std::max(deltan, nd * pv);  // all probes have unit operator norm
  }
  prof.deltan_estimate = deltan;
  return prof;
}

}  // namespace tensormp
