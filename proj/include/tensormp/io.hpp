#pragma once

// File outputs: JSONL replicate records, JSON summaries, CSV histograms and
// curves, and the run manifest.  All formatting is deterministic (shortest
// round-trip doubles in JSON, %.17g in CSV) so identical runs produce
// identical bytes.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tensormp/common.hpp"
#include "tensormp/fluctuation.hpp"
#include "tensormp/montecarlo.hpp"
#include "tensormp/mp_law.hpp"

namespace tensormp {

using Json = nlohmann::ordered_json;

void ensure_directory(const std::string& dir);

std::string format_double(double v);  // %.17g

Json complex_to_json(Complex z);  // [re, im]

// FNV-1a 64-bit over the canonical config dump, hex-encoded.
std::string config_hash(const Json& config);

// manifest.json: resolved config, its hash, the seed, and versions.
void write_manifest(const std::string& dir, const Json& config, std::uint64_t seed);

void write_jsonl(const std::string& path, const std::vector<Json>& records);
void write_json(const std::string& path, const Json& value);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

std::vector<HistogramBin> build_histogram(const std::vector<double>& samples,
                                          int bins);
void write_histogram_csv(const std::string& path,
                         const std::vector<HistogramBin>& bins);

// One eigenvalue per line under a "lambda" header.
void write_spectrum_csv(const std::string& path, const std::vector<double>& lambdas);

// lambda,density columns plus the {"atom_at_zero": x} sidecar next to it.
void write_density_csv(const std::string& path, const DensityCurve& curve);

void write_stieltjes_csv(const std::string& path, const StieltjesSolution& sol);

// Record/summary conversions.
Json esd_record_json(const EsdRecord& record);
Json esd_summary_json(const EsdResult& result, std::size_t replicates);
Json clt_record_json(const CltRecord& record);
Json clt_summary_json(const CltResult& result);
Json bilinear_record_json(std::size_t replicate, Complex sample);
Json bilinear_summary_json(const BilinearResult& result, double prediction);
Json cov_record_json(std::size_t replicate, const std::array<Complex, 2>& sample);
Json cov_summary_json(const CovResult& result, Complex z1, Complex z2,
                      Complex prediction);
Json variance_prediction_json(const VariancePrediction& pred);

}  // namespace tensormp
