// Serial reference vs OpenMP kernels on three representative workloads:
// moment-constant estimation, the ESD replicate loop, and the limit-law grid
// solve.  The parallel path must reproduce the serial bytes exactly; this
// binary checks that while timing both.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "tensormp/io.hpp"
#include "tensormp/montecarlo.hpp"
#include "tensormp/mp_law.hpp"
#include "tensormp/parallel.hpp"
#include "tensormp/vector_models.hpp"

namespace {

using namespace tensormp;

double time_seconds(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-24s serial %8.3fs   omp %8.3fs   speedup %5.2fx   identical %s\n",
              name, serial, parallel, serial / parallel,
              identical ? "yes" : "NO");
}

}  // namespace

int main() {
  const int threads = default_threads();
  std::printf("threads: %d (serial reference vs OpenMP)\n", threads);
  int mismatches = 0;

  {
    const VectorModel model = VectorModel::iid(ComponentLaw::Gaussian);
    MomentProfile serial_prof, parallel_prof;
    const double t_serial = time_seconds(
        [&] { serial_prof = empirical_moment_profile(model, 64, 200000, 7, 1); });
    const double t_parallel = time_seconds([&] {
      parallel_prof = empirical_moment_profile(model, 64, 200000, 7, threads);
    });
    const bool same = serial_prof.a22 == parallel_prof.a22 &&
                      serial_prof.kappa4 == parallel_prof.kappa4 &&
                      serial_prof.a222 == parallel_prof.a222 &&
                      serial_prof.deltan_estimate == parallel_prof.deltan_estimate;
    mismatches += !same;
    report("moment-estimation", t_serial, t_parallel, same);
  }

  {
    ExperimentPlan plan;
    plan.config = EnsembleConfig::with_ratio(24, 2, 0.5,
                                             VectorModel::iid(ComponentLaw::Gaussian),
                                             TauSpec::constant(1.0), 11);
    plan.replicates = 40;
    EsdResult serial_result, parallel_result;
    plan.threads = 1;
    const double t_serial = time_seconds([&] { serial_result = run_esd_experiment(plan); });
    plan.threads = threads;
    const double t_parallel = time_seconds([&] { parallel_result = run_esd_experiment(plan); });
    const bool same = serial_result.pooled == parallel_result.pooled &&
                      serial_result.ks == parallel_result.ks;
    mismatches += !same;
    report("esd-replicates", t_serial, t_parallel, same);
  }

  {
    const SpectralMeasure sigma = SpectralMeasure::from_atoms({{1.0, 0.5}, {2.0, 0.5}});
    std::vector<Complex> grid;
    for (int i = 0; i < 600; ++i) {
      grid.emplace_back(-1.0 + 12.0 * i / 599.0, 0.02);
    }
    StieltjesSolution serial_sol, parallel_sol;
    const double t_serial =
        time_seconds([&] { serial_sol = solve_grid(sigma, 0.7, grid, {}, 1); });
    const double t_parallel =
        time_seconds([&] { parallel_sol = solve_grid(sigma, 0.7, grid, {}, threads); });
    const bool same = serial_sol.f == parallel_sol.f && serial_sol.fprime == parallel_sol.fprime;
    mismatches += !same;
    report("mpe-grid-solve", t_serial, t_parallel, same);
  }

  if (mismatches > 0) {
    std::printf("FAILED: %d kernel(s) diverged from the serial reference\n", mismatches);
    return 1;
  }
  return 0;
}
