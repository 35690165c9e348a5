#include "tensormp/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace tensormp {

void ensure_directory(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

std::string config_hash(const Json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const std::string& dir, const Json& config, std::uint64_t seed) {
  Json manifest;
  manifest["config_hash"] = config_hash(config);
  manifest["seed"] = seed;
  manifest["versions"] = Json{{"tensormp", "0.1.0"},
                              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                            std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                            std::to_string(EIGEN_MINOR_VERSION)}};
  manifest["config"] = config;
  write_json(dir + "/manifest.json", manifest);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_jsonl(const std::string& path, const std::vector<Json>& records) {
  auto out = open_out(path);
  for (const Json& record : records) out << record.dump() << "\n";
}

void write_json(const std::string& path, const Json& value) {
  auto out = open_out(path);
  out << value.dump(2) << "\n";
}

std::vector<HistogramBin> build_histogram(const std::vector<double>& samples,
                                          int bins) {
  if (samples.empty() || bins < 1) return {};
  const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *mn_it;
  double hi = *mx_it;
  if (lo == hi) hi = lo + 1.0;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  const double width = (hi - lo) / bins;
  for (int i = 0; i < bins; ++i) {
    out[static_cast<std::size_t>(i)].left = lo + i * width;
    out[static_cast<std::size_t>(i)].right = lo + (i + 1) * width;
  }
  for (double s : samples) {
    auto idx = static_cast<std::size_t>((s - lo) / width);
    if (idx >= out.size()) idx = out.size() - 1;
    ++out[idx].count;
  }
  return out;
}

void write_histogram_csv(const std::string& path,
                         const std::vector<HistogramBin>& bins) {
  auto out = open_out(path);
  out << "bin_left,bin_right,count\n";
  for (const auto& bin : bins) {
    out << format_double(bin.left) << "," << format_double(bin.right) << ","
        << bin.count << "\n";
  }
}

void write_spectrum_csv(const std::string& path,
                        const std::vector<double>& lambdas) {
  auto out = open_out(path);
  out << "lambda\n";
  for (double v : lambdas) out << format_double(v) << "\n";
}

void write_density_csv(const std::string& path, const DensityCurve& curve) {
  auto out = open_out(path);
  out << "lambda,density\n";
  for (std::size_t i = 0; i < curve.lambda.size(); ++i) {
    out << format_double(curve.lambda[i]) << "," << format_double(curve.density[i])
        << "\n";
  }
  Json sidecar;
  sidecar["atom_at_zero"] = curve.atom_at_zero;
  auto side = open_out(path + ".atom.json");
  side << sidecar.dump() << "\n";
}

void write_stieltjes_csv(const std::string& path, const StieltjesSolution& sol) {
  auto out = open_out(path);
  out << "z_re,z_im,f_re,f_im,fprime_re,fprime_im,iterations,residual\n";
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    out << format_double(sol.grid[i].real()) << "," << format_double(sol.grid[i].imag())
        << "," << format_double(sol.f[i].real()) << "," << format_double(sol.f[i].imag())
        << "," << format_double(sol.fprime[i].real()) << ","
        << format_double(sol.fprime[i].imag()) << "," << sol.iterations[i] << ","
        << format_double(sol.residuals[i]) << "\n";
  }
}

Json esd_record_json(const EsdRecord& record) {
  Json j;
  j["replicate"] = record.replicate;
  j["lambda_min"] = record.lambda_min;
  j["lambda_max"] = record.lambda_max;
  j["trace"] = record.trace;
  return j;
}

Json esd_summary_json(const EsdResult& result, std::size_t replicates) {
  Json j;
  j["replicates"] = replicates;
  j["pooled_eigenvalues"] = result.pooled.size();
  j["ks"] = result.ks;
  j["c_eff"] = result.c_eff;
  j["atom_at_zero"] = result.reference.atom_at_zero;
  j["reference_mass"] = result.reference.mass();
  return j;
}

Json clt_record_json(const CltRecord& record) {
  Json j;
  j["replicate"] = record.replicate;
  j["statistics"] = record.statistics;
  return j;
}

Json clt_summary_json(const CltResult& result) {
  Json summaries = Json::array();
  for (const auto& s : result.summaries) {
    Json j;
    j["phi"] = s.phi;
    j["variance"] = s.variance;
    j["variance_se"] = s.variance_se;
    j["skewness"] = s.skewness;
    j["excess_kurtosis"] = s.excess_kurtosis;
    j["ks_normal"] = s.ks_normal;
    j["normality_flag"] = s.normality_flag;
    j["underpowered"] = s.underpowered;
    j["support_escape"] = s.support_escape;
    j["trace_fast_path"] = s.trace_fast_path;
    summaries.push_back(std::move(j));
  }
  Json j;
  j["replicates"] = result.records.size();
  j["phi_summaries"] = std::move(summaries);
  return j;
}

Json bilinear_record_json(std::size_t replicate, Complex sample) {
  Json j;
  j["replicate"] = replicate;
  j["form"] = complex_to_json(sample);
  return j;
}

Json bilinear_summary_json(const BilinearResult& result, double prediction) {
  Json j;
  j["replicates"] = result.samples.size();
  j["n_var"] = result.n_var;
  j["se"] = result.se;
  j["prediction"] = prediction;
  return j;
}

Json cov_record_json(std::size_t replicate, const std::array<Complex, 2>& sample) {
  Json j;
  j["replicate"] = replicate;
  j["gamma1"] = complex_to_json(sample[0]);
  j["gamma2"] = complex_to_json(sample[1]);
  return j;
}

Json cov_summary_json(const CovResult& result, Complex z1, Complex z2,
                      Complex prediction) {
  Json j;
  j["replicates"] = result.samples.size();
  j["z1"] = complex_to_json(z1);
  j["z2"] = complex_to_json(z2);
  j["c_n"] = complex_to_json(result.c_n);
  j["se_re"] = result.se_re;
  j["se_im"] = result.se_im;
  j["prediction"] = complex_to_json(prediction);
  return j;
}

Json variance_prediction_json(const VariancePrediction& pred) {
  Json j;
  j["phi"] = pred.phi_name;
  j["eta_schedule"] = pred.eta_schedule;
  j["V_eta"] = pred.v_eta;
  j["V"] = pred.value;
  j["a"] = pred.a;
  j["b"] = pred.b;
  j["c"] = pred.c;
  return j;
}

}  // namespace tensormp
