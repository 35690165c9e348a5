#pragma once

// JSON experiment configs for the CLI: strict parsing (unknown keys are
// rejected, bad kinds list the valid ones) into typed jobs, plus the
// canonical resolved form that goes into the run manifest.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tensormp/common.hpp"
#include "tensormp/ensemble.hpp"
#include "tensormp/spectral_measure.hpp"
#include "tensormp/test_function.hpp"
#include "tensormp/vector_models.hpp"

namespace tensormp {

using Json = nlohmann::ordered_json;

struct HSpec {
  enum class Kind { Identity, Resolvent };
  Kind kind = Kind::Identity;
  Complex z;                               // resolvent point
  std::optional<EnsembleConfig> ensemble;  // frozen sample for the resolvent
};

struct EsdJob {
  EnsembleConfig ensemble;
  std::size_t replicates = 0;
  int histogram_bins = 100;
  bool dump_spectra = false;
};

struct CltJob {
  EnsembleConfig ensemble;
  std::size_t replicates = 0;
  std::vector<TestFunction> phis;
};

struct BilinearJob {
  VectorModel model;
  Eigen::Index n = 0;
  std::size_t replicates = 0;
  HSpec h;
  std::uint64_t seed = 0;
  // Moment constants for the predicted value: analytic when available.
  std::optional<double> a, b;
};

struct CovJob {
  EnsembleConfig ensemble;
  std::size_t replicates = 0;
  std::vector<std::array<Complex, 2>> probes;
  std::optional<double> a, b;
};

struct MpSolveJob {
  TauSpec taus = TauSpec::constant(1.0);
  double c = 1.0;
  std::vector<Complex> grid;
  bool with_density = false;
  int density_points = 1200;
  std::vector<double> eta_schedule;
};

struct PredictVarianceJob {
  TauSpec taus = TauSpec::constant(1.0);
  double c = 1.0;
  double a = 0.0;
  double b = 0.0;
  std::vector<TestFunction> phis;
  std::vector<double> eta_schedule;
};

struct MomentsJob {
  VectorModel model;
  Eigen::Index n = 0;
  std::size_t replicates = 0;
};

struct Job {
  std::string experiment;
  std::string out;  // output directory (may be overridden by --out)
  std::variant<EsdJob, CltJob, BilinearJob, CovJob, MpSolveJob,
               PredictVarianceJob, MomentsJob>
      payload;
};

// Throws ConfigError on any validation problem; messages name the offending
// field.
Job parse_job(const Json& config);

// Piecewise parsers, exposed for reuse and tests.
VectorModel parse_model(const Json& j, const std::string& context);
TauSpec parse_taus(const Json& j, const std::string& context);
TestFunction parse_phi(const Json& j, const std::string& context);
EnsembleConfig parse_ensemble(const Json& j, const std::string& context);

// Canonical resolved forms (stable key order) for manifests.
Json model_to_json(const VectorModel& model);
Json taus_to_json(const TauSpec& taus);
Json phi_to_json(const TestFunction& phi);
Json ensemble_to_json(const EnsembleConfig& config);
Json job_to_json(const Job& job);

}  // namespace tensormp
