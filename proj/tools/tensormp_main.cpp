// tensormp: batch front end for tensor-product sample covariance experiments.
//
// Subcommands: esd, clt, bilinear, cov, mp-solve, predict-variance, moments.
// Every run writes a manifest (resolved config, hash, seed, versions) and
// machine-readable outputs under --out, and prints a one-line JSON summary to
// stdout.  Exit codes: 0 success, 2 config validation error, 3 numerical
// non-convergence.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tensormp/config.hpp"
#include "tensormp/fluctuation.hpp"
#include "tensormp/io.hpp"
#include "tensormp/montecarlo.hpp"
#include "tensormp/parallel.hpp"

namespace {

using namespace tensormp;

struct Overrides {
  std::string config_path;
  std::string out;
  std::optional<std::int64_t> seed;
  std::optional<std::int64_t> replicates;
  int threads = 0;
};

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return j;
}

std::string output_dir(const Job& job, const Overrides& ov) {
  if (!ov.out.empty()) return ov.out;
  if (!job.out.empty()) return job.out;
  return "out/" + job.experiment;
}

void apply_overrides(Job& job, const Overrides& ov) {
  std::visit(
      [&](auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if (ov.replicates) {
          if (*ov.replicates < 2) throw ConfigError("--replicates must be >= 2");
          if constexpr (std::is_same_v<T, EsdJob> || std::is_same_v<T, CltJob> ||
                        std::is_same_v<T, BilinearJob> || std::is_same_v<T, CovJob> ||
                        std::is_same_v<T, MomentsJob>) {
            payload.replicates = static_cast<std::size_t>(*ov.replicates);
          }
        }
        if (ov.seed) {
          const auto seed = static_cast<std::uint64_t>(*ov.seed);
          if constexpr (std::is_same_v<T, EsdJob> || std::is_same_v<T, CltJob> ||
                        std::is_same_v<T, CovJob>) {
            payload.ensemble.master_seed = seed;
          } else if constexpr (std::is_same_v<T, BilinearJob>) {
            payload.seed = seed;
          }
        }
      },
      job.payload);
}

// Moment constants for predictions: explicit values win, else the analytic
// profile of the model.
std::pair<double, double> moment_constants(const std::optional<double>& a,
                                           const std::optional<double>& b,
                                           const VectorModel& model,
                                           Eigen::Index n) {
  if (a && b) return {*a, *b};
  const auto prof = analytic_moment_profile(model, n);
  if (!prof) {
    throw ConfigError(
        "model has no analytic moment constants (lp-ball is empirical only); "
        "pass 'a' and 'b' explicitly");
  }
  return {a.value_or(prof->a), b.value_or(prof->b)};
}

int run_esd(const Job& job, const EsdJob& esd, const Overrides& ov) {
  const std::string dir = output_dir(job, ov);
  ensure_directory(dir);
  ExperimentPlan plan;
  plan.config = esd.ensemble;
  plan.replicates = esd.replicates;
  plan.threads = ov.threads;
  plan.histogram_bins = esd.histogram_bins;
  const EsdResult result = run_esd_experiment(plan);

  std::vector<Json> records;
  records.reserve(result.records.size());
  for (const auto& r : result.records) records.push_back(esd_record_json(r));
  write_jsonl(dir + "/records.jsonl", records);
  const Json summary = esd_summary_json(result, plan.replicates);
  write_json(dir + "/summary.json", summary);
  write_histogram_csv(dir + "/histogram.csv",
                      build_histogram(result.pooled, esd.histogram_bins));
  write_density_csv(dir + "/reference_density.csv", result.reference);
  if (esd.dump_spectra) write_spectrum_csv(dir + "/spectra.csv", result.pooled);
  write_manifest(dir, job_to_json(job), esd.ensemble.master_seed);

  Json line = summary;
  line["experiment"] = "esd";
  line["out"] = dir;
  std::cout << line.dump() << "\n";
  return 0;
}

int run_clt(const Job& job, const CltJob& clt, const Overrides& ov) {
  const std::string dir = output_dir(job, ov);
  ensure_directory(dir);
  ExperimentPlan plan;
  plan.config = clt.ensemble;
  plan.replicates = clt.replicates;
  plan.threads = ov.threads;
  plan.phis = clt.phis;
  const CltResult result = run_clt_experiment(plan);

  std::vector<Json> records;
  records.reserve(result.records.size());
  for (const auto& r : result.records) records.push_back(clt_record_json(r));
  write_jsonl(dir + "/records.jsonl", records);
  const Json summary = clt_summary_json(result);
  write_json(dir + "/summary.json", summary);
  for (std::size_t p = 0; p < result.summaries.size(); ++p) {
    write_histogram_csv(dir + "/histogram_" + std::to_string(p) + ".csv",
                        build_histogram(result.summaries[p].samples, 80));
  }
  write_manifest(dir, job_to_json(job), clt.ensemble.master_seed);

  Json line = summary;
  line["experiment"] = "clt";
  line["out"] = dir;
  std::cout << line.dump() << "\n";
  return 0;
}

int run_bilinear(const Job& job, const BilinearJob& bil, const Overrides& ov) {
  const std::string dir = output_dir(job, ov);
  ensure_directory(dir);
  const Eigen::Index dim = bil.n * bil.n;
  Eigen::MatrixXcd h;
  if (bil.h.kind == HSpec::Kind::Identity) {
    h = Eigen::MatrixXcd::Identity(dim, dim);
  } else {
    EnsembleConfig frozen = *bil.h.ensemble;
    PhiloxStream stream = derive_stream(frozen.master_seed, 0);
    const SampleMatrix mat = assemble(frozen, stream);
    if (mat.dimension() != dim) {
      throw ConfigError("bilinear: resolvent ensemble dimension != n^2");
    }
    const Eigen::MatrixXcd shifted =
        mat.dense().cast<Complex>() - bil.h.z * Eigen::MatrixXcd::Identity(dim, dim);
    h = shifted.partialPivLu().inverse();
    h = 0.5 * (h + h.transpose()).eval();  // resolvent of symmetric M is symmetric
  }
  const BilinearResult result =
      run_bilinear_experiment(h, bil.model, bil.n, bil.replicates, bil.seed, ov.threads);
  const auto [a, b] = moment_constants(bil.a, bil.b, bil.model, bil.n);
  const double prediction = bilinear_variance_rhs(h, a, b);

  std::vector<Json> records;
  records.reserve(result.samples.size());
  for (std::size_t r = 0; r < result.samples.size(); ++r) {
    records.push_back(bilinear_record_json(r, result.samples[r]));
  }
  write_jsonl(dir + "/records.jsonl", records);
  const Json summary = bilinear_summary_json(result, prediction);
  write_json(dir + "/summary.json", summary);
  write_manifest(dir, job_to_json(job), bil.seed);

  Json line = summary;
  line["experiment"] = "bilinear";
  line["out"] = dir;
  std::cout << line.dump() << "\n";
  return 0;
}

int run_cov(const Job& job, const CovJob& cov, const Overrides& ov) {
  const std::string dir = output_dir(job, ov);
  ensure_directory(dir);
  ExperimentPlan plan;
  plan.config = cov.ensemble;
  plan.replicates = cov.replicates;
  plan.threads = ov.threads;
  const auto [a, b] =
      moment_constants(cov.a, cov.b, cov.ensemble.model, cov.ensemble.n);
  const std::vector<double> taus =
      realize_taus(cov.ensemble.taus, static_cast<std::size_t>(cov.ensemble.m));
  const SpectralMeasure sigma_m = ncm(taus);
  const double c_eff = cov.ensemble.concentration();

  Json probes_summary = Json::array();
  for (std::size_t p = 0; p < cov.probes.size(); ++p) {
    const Complex z1 = cov.probes[p][0];
    const Complex z2 = cov.probes[p][1];
    const CovResult result = run_cov_experiment(plan, z1, z2);
    const Complex prediction = trace_covariance(sigma_m, c_eff, a, b, z1, z2);
    std::vector<Json> records;
    records.reserve(result.samples.size());
    for (std::size_t r = 0; r < result.samples.size(); ++r) {
      records.push_back(cov_record_json(r, result.samples[r]));
    }
    write_jsonl(dir + "/records_" + std::to_string(p) + ".jsonl", records);
    probes_summary.push_back(cov_summary_json(result, z1, z2, prediction));
  }
  Json summary;
  summary["replicates"] = cov.replicates;
  summary["probes"] = std::move(probes_summary);
  write_json(dir + "/summary.json", summary);
  write_manifest(dir, job_to_json(job), cov.ensemble.master_seed);

  Json line = summary;
  line["experiment"] = "cov";
  line["out"] = dir;
  std::cout << line.dump() << "\n";
  return 0;
}

int run_mp_solve(const Job& job, const MpSolveJob& mp, const Overrides& ov) {
  const std::string dir = output_dir(job, ov);
  ensure_directory(dir);
  const SpectralMeasure sigma = mp.taus.limit_measure();
  const StieltjesSolution solution =
      solve_grid(sigma, mp.c, mp.grid, MpeOptions{}, ov.threads);
  write_stieltjes_csv(dir + "/stieltjes.csv", solution);
  double max_residual = 0.0;
  for (double r : solution.residuals) max_residual = std::max(max_residual, r);

  Json summary;
  summary["points"] = solution.grid.size();
  summary["max_residual"] = max_residual;
  if (mp.with_density) {
    DensityCurve curve =
        mp.eta_schedule.empty()
            ? density(sigma, mp.c, mp.density_points, MpeOptions{}, ov.threads)
            : [&] {
                const auto support = estimate_support(sigma, mp.c);
                const double pad = 0.05 * (support.second - support.first);
                std::vector<double> grid(static_cast<std::size_t>(mp.density_points));
                for (int i = 0; i < mp.density_points; ++i) {
                  grid[static_cast<std::size_t>(i)] =
                      support.first - pad +
                      (support.second - support.first + 2 * pad) *
                          static_cast<double>(i) / (mp.density_points - 1);
                }
                return density(sigma, mp.c, grid, mp.eta_schedule, MpeOptions{},
                               ov.threads);
              }();
    write_density_csv(dir + "/density.csv", curve);
    summary["density_mass"] = curve.mass();
    summary["atom_at_zero"] = curve.atom_at_zero;
    summary["support_warning"] = curve.support_warning;
  }
  write_json(dir + "/summary.json", summary);
  write_manifest(dir, job_to_json(job), 0);

  Json line = summary;
  line["experiment"] = "mp-solve";
  line["out"] = dir;
  std::cout << line.dump() << "\n";
  return 0;
}

int run_predict_variance(const Job& job, const PredictVarianceJob& pv,
                         const Overrides& ov) {
  const std::string dir = output_dir(job, ov);
  ensure_directory(dir);
  const SpectralMeasure sigma = pv.taus.limit_measure();
  const bool tau_is_unit =
      sigma.atoms().size() == 1 && sigma.atoms().front().value == 1.0;
  std::vector<Json> records;
  Json predictions = Json::array();
  for (const auto& phi : pv.phis) {
    const VariancePrediction pred = clt_variance(sigma, pv.c, pv.a, pv.b, phi,
                                                 pv.eta_schedule, MpeOptions{},
                                                 ov.threads);
    Json j = variance_prediction_json(pred);
    if (tau_is_unit) {
      j["V_closed_form"] = clt_variance_closed_form(pv.c, pv.a, pv.b, phi);
    }
    records.push_back(j);
    predictions.push_back(std::move(j));
  }
  write_jsonl(dir + "/predictions.jsonl", records);
  Json summary;
  summary["predictions"] = std::move(predictions);
  write_json(dir + "/summary.json", summary);
  write_manifest(dir, job_to_json(job), 0);

  Json line = summary;
  line["experiment"] = "predict-variance";
  line["out"] = dir;
  std::cout << line.dump() << "\n";
  return 0;
}

void print_moment_row(const char* name, const std::optional<double>& analytic,
                      double empirical, double se) {
  std::printf("  %-10s %16s %16.8g %12.3g\n", name,
              analytic ? format_double(*analytic).c_str() : "n/a", empirical, se);
}

int run_moments(const Job& job, const MomentsJob& mom, const Overrides& ov) {
  const std::uint64_t seed = ov.seed ? static_cast<std::uint64_t>(*ov.seed) : 0;
  const auto analytic = analytic_moment_profile(mom.model, mom.n);
  const MomentProfile emp =
      empirical_moment_profile(mom.model, mom.n, mom.replicates, seed, ov.threads);

  std::printf("moments: model=%s n=%lld replicates=%zu\n", mom.model.name().c_str(),
              static_cast<long long>(mom.n), mom.replicates);
  std::printf("  %-10s %16s %16s %12s\n", "quantity", "analytic", "empirical", "se");
  auto opt = [&](double MomentProfile::*field) {
    return analytic ? std::optional<double>((*analytic).*field) : std::nullopt;
  };
  print_moment_row("a22", opt(&MomentProfile::a22), emp.a22, emp.se_a22);
  print_moment_row("kappa4", opt(&MomentProfile::kappa4), emp.kappa4, emp.se_kappa4);
  print_moment_row("a222", opt(&MomentProfile::a222), emp.a222, emp.se_a222);
  print_moment_row("a24", opt(&MomentProfile::a24), emp.a24, emp.se_a24);
  print_moment_row("a6", opt(&MomentProfile::a6), emp.a6, emp.se_a6);
  print_moment_row("a", opt(&MomentProfile::a), emp.a, emp.se_a);
  print_moment_row("b", opt(&MomentProfile::b), emp.b, emp.se_b);
  const std::optional<double> abc =
      analytic ? std::optional<double>(analytic->a + analytic->b + 2.0) : std::nullopt;
  print_moment_row("a+b+2", abc, emp.a + emp.b + 2.0,
                   std::sqrt(emp.se_a * emp.se_a + emp.se_b * emp.se_b));
  print_moment_row("delta_n", std::nullopt, emp.deltan_estimate, 0.0);

  Json summary;
  summary["model"] = model_to_json(mom.model);
  summary["n"] = mom.n;
  summary["replicates"] = mom.replicates;
  if (analytic) {
    summary["analytic"] = Json{{"a22", analytic->a22},   {"kappa4", analytic->kappa4},
                               {"a222", analytic->a222}, {"a24", analytic->a24},
                               {"a6", analytic->a6},     {"a", analytic->a},
                               {"b", analytic->b}};
  } else {
    summary["analytic"] = nullptr;
  }
  summary["empirical"] = Json{{"a22", emp.a22},     {"se_a22", emp.se_a22},
                              {"kappa4", emp.kappa4}, {"se_kappa4", emp.se_kappa4},
                              {"a222", emp.a222},   {"se_a222", emp.se_a222},
                              {"a24", emp.a24},     {"se_a24", emp.se_a24},
                              {"a6", emp.a6},       {"se_a6", emp.se_a6},
                              {"a", emp.a},         {"se_a", emp.se_a},
                              {"b", emp.b},         {"se_b", emp.se_b},
                              {"deltan_estimate", emp.deltan_estimate}};
  summary["a_plus_b_plus_2"] = emp.a + emp.b + 2.0;
  summary["se_a_plus_b_plus_2"] =
      std::sqrt(emp.se_a * emp.se_a + emp.se_b * emp.se_b);
  if (!ov.out.empty() || !job.out.empty()) {
    const std::string dir = output_dir(job, ov);
    ensure_directory(dir);
    write_json(dir + "/summary.json", summary);
    write_manifest(dir, job_to_json(job), seed);
  }
  Json line = summary;
  line["experiment"] = "moments";
  std::cout << line.dump() << "\n";
  return 0;
}

int dispatch(Job job, const Overrides& ov) {
  apply_overrides(job, ov);
  return std::visit(
      [&](const auto& payload) -> int {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, EsdJob>) return run_esd(job, payload, ov);
        else if constexpr (std::is_same_v<T, CltJob>) return run_clt(job, payload, ov);
        else if constexpr (std::is_same_v<T, BilinearJob>) return run_bilinear(job, payload, ov);
        else if constexpr (std::is_same_v<T, CovJob>) return run_cov(job, payload, ov);
        else if constexpr (std::is_same_v<T, MpSolveJob>) return run_mp_solve(job, payload, ov);
        else if constexpr (std::is_same_v<T, PredictVarianceJob>)
          return run_predict_variance(job, payload, ov);
        else return run_moments(job, payload, ov);
      },
      job.payload);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor-product sample covariance laboratory"};
  app.require_subcommand(1);

  Overrides ov;
  ov.threads = default_threads();

  std::string moments_model, moments_law = "gaussian";
  double moments_p = 2.0;
  std::int64_t moments_n = 0;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    cmd->add_option("--config", ov.config_path, "JSON config file")
        ->required(config_required);
    cmd->add_option("--seed", ov.seed, "override the master seed");
    cmd->add_option("--out", ov.out, "output directory");
    cmd->add_option("--replicates", ov.replicates, "override the replicate count");
    cmd->add_option("--threads", ov.threads, "worker threads (default TENSORMP_THREADS)");
  };

  CLI::App* cmd_esd = app.add_subcommand("esd", "empirical spectral distribution vs the limit law");
  CLI::App* cmd_clt = app.add_subcommand("clt", "centered linear eigenvalue statistics");
  CLI::App* cmd_bilinear = app.add_subcommand("bilinear", "bilinear form variance");
  CLI::App* cmd_cov = app.add_subcommand("cov", "resolvent trace covariance");
  CLI::App* cmd_mp = app.add_subcommand("mp-solve", "limit-law transform and density");
  CLI::App* cmd_pv = app.add_subcommand("predict-variance", "CLT variance predictions");
  CLI::App* cmd_moments = app.add_subcommand("moments", "vector model moment constants");
  for (CLI::App* cmd : {cmd_esd, cmd_clt, cmd_bilinear, cmd_cov, cmd_mp, cmd_pv}) {
    add_common(cmd, true);
  }
  add_common(cmd_moments, false);
  cmd_moments->add_option("--model", moments_model, "model kind: iid, sphere, lp");
  cmd_moments->add_option("--law", moments_law,
                          "iid law: gaussian, rademacher, uniform, student");
  cmd_moments->add_option("--p", moments_p, "lp-ball exponent");
  cmd_moments->add_option("--n", moments_n, "dimension");

  CLI11_PARSE(app, argc, argv);

  try {
    Job job;
    if (app.got_subcommand(cmd_moments) && ov.config_path.empty()) {
      if (moments_model.empty() || moments_n < 3) {
        throw ConfigError("moments: give --config or (--model and --n >= 3)");
      }
      Json j;
      j["experiment"] = "moments";
      Json model;
      model["kind"] = moments_model;
      if (moments_model == "iid") model["law"] = moments_law;
      if (moments_model == "lp") model["p"] = moments_p;
      j["model"] = std::move(model);
      j["n"] = moments_n;
      j["replicates"] = ov.replicates.value_or(200000);
      job = parse_job(j);
    } else {
      job = parse_job(load_config(ov.config_path));
    }
    const std::string experiment_names[] = {"esd", "clt", "bilinear", "cov",
                                            "mp-solve", "predict-variance", "moments"};
    CLI::App* cmds[] = {cmd_esd, cmd_clt, cmd_bilinear, cmd_cov, cmd_mp, cmd_pv,
                        cmd_moments};
    for (std::size_t i = 0; i < 7; ++i) {
      if (app.got_subcommand(cmds[i]) && job.experiment != experiment_names[i]) {
        throw ConfigError("config experiment '" + job.experiment +
                          "' does not match subcommand '" + experiment_names[i] + "'");
      }
    }
    return dispatch(std::move(job), ov);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NonConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const QuadratureError& e) {
    std::cerr << "numerical error: " << e.what() << " (estimate " << e.estimate()
              << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
