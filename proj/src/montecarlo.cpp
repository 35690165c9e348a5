#include "tensormp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tensormp/parallel.hpp"

namespace tensormp {

void validate_plan(const ExperimentPlan& plan) {
  if (plan.replicates < 2) throw std::invalid_argument("plan: replicates < 2");
  for (const Complex& z : plan.z_probes) {
    if (z.imag() == 0.0) throw std::invalid_argument("plan: z probe on the real axis");
  }
}

EsdResult run_esd_experiment(const ExperimentPlan& plan) {
  validate_plan(plan);
  const Eigen::Index dim = plan.config.dimension();
  const std::size_t reps = plan.replicates;

  EsdResult result;
  result.records.resize(reps);
  std::vector<std::vector<double>> spectra(reps);
  for_each_index(reps, plan.threads, [&](std::size_t r) {
    PhiloxStream stream = derive_stream(plan.config.master_seed, r);
    const SampleMatrix mat = assemble(plan.config, stream);
    const Spectrum spec = eigenvalues(mat);
    result.records[r] = {r, spec.eigenvalues.front(), spec.eigenvalues.back(),
                         mat.trace()};
    spectra[r] = spec.eigenvalues;
  });
  result.pooled.reserve(reps * static_cast<std::size_t>(dim));
  for (const auto& s : spectra) {
    result.pooled.insert(result.pooled.end(), s.begin(), s.end());
  }
  std::sort(result.pooled.begin(), result.pooled.end());

  // Reference law matched to the realized tau sequence and c = m / N.
  result.c_eff = plan.config.concentration();
  const std::vector<double> taus =
      realize_taus(plan.config.taus, static_cast<std::size_t>(plan.config.m));
  const SpectralMeasure sigma_m = ncm(taus);
  result.reference = density(sigma_m, result.c_eff, 1600, MpeOptions{}, plan.threads);
  const MpCdf cdf(result.reference);
  result.ks = ks_statistic(result.pooled, [&cdf](double x) { return cdf(x); });
  return result;
}

namespace {

bool trace_fast_path_eligible(const TestFunction& phi) {
  return phi.kind() == TestFunction::Kind::Monomial && !phi.params().tapered &&
         phi.params().degree >= 1 && phi.params().degree <= 2;
}

CltPhiSummary summarize_clt_samples(const std::string& name,
                                    std::vector<double> raw, Eigen::Index n,
                                    int k) {
  CltPhiSummary summary;
  summary.phi = name;
  const double norm = std::pow(static_cast<double>(n),
                               -0.5 * static_cast<double>(k - 1));
  const double mean = sample_mean(raw);
  std::vector<double> centered(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    centered[i] = norm * (raw[i] - mean);
  }
  const MomentSummary ms = moment_summary(centered);
  summary.variance = ms.variance;
  summary.skewness = ms.skewness;
  summary.excess_kurtosis = ms.excess_kurtosis;
  summary.underpowered = raw.size() < 200;
  summary.normality_flag =
      std::abs(ms.skewness) > 0.15 || std::abs(ms.excess_kurtosis) > 0.3;
  // Jackknife SE of the sample variance from (x, x^2) rows.
  std::vector<double> rows(2 * centered.size());
  for (std::size_t i = 0; i < centered.size(); ++i) {
    rows[2 * i] = centered[i];
    rows[2 * i + 1] = centered[i] * centered[i];
  }
  const double r = static_cast<double>(centered.size());
  summary.variance_se = jackknife_se(
      centered.size(), 2, rows.data(), [r](std::span<const double> means) {
        return (r - 1.0) / (r - 2.0) * (means[1] - means[0] * means[0]);
      });
  const double sd = std::sqrt(std::max(ms.variance, 1e-300));
  summary.ks_normal = ks_statistic(
      centered, [sd](double x) { return normal_cdf(x / sd); });
  summary.samples = std::move(centered);
  return summary;
}

}  // namespace

CltResult run_clt_experiment(const ExperimentPlan& plan) {
  validate_plan(plan);
  if (plan.phis.empty()) throw std::invalid_argument("clt: no test functions");
  const std::size_t reps = plan.replicates;
  const std::size_t num_phi = plan.phis.size();

  std::vector<bool> fast(num_phi);
  bool need_spectrum = false;
  for (std::size_t p = 0; p < num_phi; ++p) {
    fast[p] = trace_fast_path_eligible(plan.phis[p]);
    if (!fast[p]) need_spectrum = true;
  }

  CltResult result;
  result.records.resize(reps);
  std::vector<std::uint8_t> escape(reps, 0);
  for_each_index(reps, plan.threads, [&](std::size_t r) {
    PhiloxStream stream = derive_stream(plan.config.master_seed, r);
    const SampleMatrix mat = assemble(plan.config, stream);
    Spectrum spec;
    if (need_spectrum) spec = eigenvalues(mat);
    CltRecord record;
    record.replicate = r;
    record.statistics.resize(num_phi);
    for (std::size_t p = 0; p < num_phi; ++p) {
      if (fast[p]) {
        record.statistics[p] = mat.trace_power(plan.phis[p].params().degree);
      } else {
        record.statistics[p] = linear_statistic(spec, plan.phis[p]);
      }
    }
    if (need_spectrum) {
      for (std::size_t p = 0; p < num_phi; ++p) {
        const auto& phi = plan.phis[p];
        if (phi.kind() == TestFunction::Kind::Monomial && phi.params().tapered) {
          if (spec.eigenvalues.front() < phi.params().lo ||
              spec.eigenvalues.back() > phi.params().hi) {
            escape[r] = 1;
          }
        }
      }
    }
    result.records[r] = std::move(record);
  });

  const bool any_escape =
      std::any_of(escape.begin(), escape.end(), [](std::uint8_t e) { return e != 0; });
  for (std::size_t p = 0; p < num_phi; ++p) {
    std::vector<double> raw(reps);
    for (std::size_t r = 0; r < reps; ++r) raw[r] = result.records[r].statistics[p];
    CltPhiSummary summary = summarize_clt_samples(plan.phis[p].name(), std::move(raw),
                                                  plan.config.n, plan.config.k);
    summary.trace_fast_path = fast[p];
    summary.support_escape =
        plan.phis[p].kind() == TestFunction::Kind::Monomial &&
        plan.phis[p].params().tapered && any_escape;
    result.summaries.push_back(std::move(summary));
  }
  return result;
}

BilinearResult run_bilinear_experiment(const Eigen::MatrixXcd& h,
                                       const VectorModel& model, Eigen::Index n,
                                       std::size_t reps, std::uint64_t seed,
                                       int threads) {
  if (reps < 2) throw std::invalid_argument("bilinear: reps < 2");
  const Eigen::Index dim = n * n;
  if (h.rows() != dim || h.cols() != dim) {
    throw std::invalid_argument("bilinear: H must be n^2 x n^2");
  }
  const Eigen::MatrixXd h_re = h.real();
  const Eigen::MatrixXd h_im = h.imag();
  const bool complex_part = h_im.cwiseAbs().maxCoeff() > 0.0;

  constexpr std::size_t kBlock = 128;
  const std::size_t blocks = (reps + kBlock - 1) / kBlock;
  BilinearResult result;
  result.samples.resize(reps);
  for_each_index(blocks, threads, [&](std::size_t block) {
    const std::size_t begin = block * kBlock;
    const std::size_t end = std::min(reps, begin + kBlock);
    const Eigen::Index width = static_cast<Eigen::Index>(end - begin);
    Eigen::MatrixXd ys(dim, width);
    for (std::size_t r = begin; r < end; ++r) {
      PhiloxStream stream = derive_stream(seed, r);
      ys.col(static_cast<Eigen::Index>(r - begin)) =
          tensor_sample(model, n, 2, stream);
    }
    const Eigen::MatrixXd re = h_re * ys;
    Eigen::MatrixXd im;
    if (complex_part) im = h_im * ys;
    for (std::size_t r = begin; r < end; ++r) {
      const auto col = static_cast<Eigen::Index>(r - begin);
      const double quad_re = ys.col(col).dot(re.col(col));
      const double quad_im = complex_part ? ys.col(col).dot(im.col(col)) : 0.0;
      result.samples[r] = Complex(quad_re, quad_im);
    }
  });

  Complex mean = 0.0;
  for (const Complex& s : result.samples) mean += s;
  mean /= static_cast<double>(reps);
  double ss = 0.0;
  for (const Complex& s : result.samples) ss += std::norm(s - mean);
  const double nd = static_cast<double>(n);
  result.n_var = nd * ss / static_cast<double>(reps - 1);

  // Jackknife on rows (re, im, |xi|^2).
  std::vector<double> rows(3 * reps);
  for (std::size_t r = 0; r < reps; ++r) {
    rows[3 * r] = result.samples[r].real();
    rows[3 * r + 1] = result.samples[r].imag();
    rows[3 * r + 2] = std::norm(result.samples[r]);
  }
  const double rd = static_cast<double>(reps);
  result.se = jackknife_se(
      reps, 3, rows.data(), [rd, nd](std::span<const double> means) {
        const double var =
            (rd - 1.0) / (rd - 2.0) *
            (means[2] - means[0] * means[0] - means[1] * means[1]);
        return nd * var;
      });
  return result;
}

CovResult run_cov_experiment(const ExperimentPlan& plan, Complex z1, Complex z2) {
  validate_plan(plan);
  if (plan.replicates < 500) {
    throw std::invalid_argument("cov: needs >= 500 replicates");
  }
  if (z1.imag() == 0.0 || z2.imag() == 0.0) {
    throw std::invalid_argument("cov: z probes must be off the real axis");
  }
  const std::size_t reps = plan.replicates;
  CovResult result;
  result.samples.resize(reps);
  for_each_index(reps, plan.threads, [&](std::size_t r) {
    PhiloxStream stream = derive_stream(plan.config.master_seed, r);
    const SampleMatrix mat = assemble(plan.config, stream);
    const Spectrum spec = eigenvalues(mat);
    result.samples[r] = {resolvent_trace(spec, z1), resolvent_trace(spec, z2)};
  });

  Complex mean1 = 0.0, mean2 = 0.0;
  for (const auto& s : result.samples) {
    mean1 += s[0];
    mean2 += s[1];
  }
  const double rd = static_cast<double>(reps);
  mean1 /= rd;
  mean2 /= rd;
  Complex cov = 0.0;
  for (const auto& s : result.samples) cov += (s[0] - mean1) * (s[1] - mean2);
  cov /= rd - 1.0;
  const double nd = static_cast<double>(plan.config.n);
  result.c_n = cov / nd;

  // Jackknife rows: re/im of each trace and of the product.
  std::vector<double> rows(6 * reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const Complex prod = result.samples[r][0] * result.samples[r][1];
    rows[6 * r] = result.samples[r][0].real();
    rows[6 * r + 1] = result.samples[r][0].imag();
    rows[6 * r + 2] = result.samples[r][1].real();
    rows[6 * r + 3] = result.samples[r][1].imag();
    rows[6 * r + 4] = prod.real();
    rows[6 * r + 5] = prod.imag();
  }
  auto cov_from_means = [rd, nd](std::span<const double> m, bool real_part) {
    const Complex g1(m[0], m[1]);
    const Complex g2(m[2], m[3]);
    const Complex prod(m[4], m[5]);
    const Complex c = (rd - 1.0) / (rd - 2.0) * (prod - g1 * g2) / nd;
    return real_part ? c.real() : c.imag();
  };
  result.se_re = jackknife_se(reps, 6, rows.data(),
                              [&](std::span<const double> m) {
                                return cov_from_means(m, true);
                              });
  result.se_im = jackknife_se(reps, 6, rows.data(),
                              [&](std::span<const double> m) {
                                return cov_from_means(m, false);
                              });
  return result;
}

}  // namespace tensormp
