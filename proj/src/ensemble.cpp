#include "tensormp/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tensormp/common.hpp"

namespace tensormp {

namespace {

Eigen::Index checked_dimension(Eigen::Index n, int k) {
  if (n < 2) throw std::invalid_argument("EnsembleConfig: n < 2");
  if (k < 1) throw std::invalid_argument("EnsembleConfig: k < 1");
  long double total = 1.0L;
  for (int i = 0; i < k; ++i) total *= static_cast<long double>(n);
  if (total > 1e15L) throw std::invalid_argument("EnsembleConfig: n^k overflows");
  return static_cast<Eigen::Index>(total);
}

}  // namespace

EnsembleConfig EnsembleConfig::with_m(Eigen::Index n, int k, Eigen::Index m,
                                      VectorModel model, TauSpec taus,
                                      std::uint64_t seed) {
  checked_dimension(n, k);
  if (m < 1) throw std::invalid_argument("EnsembleConfig: m < 1");
  EnsembleConfig config;
  config.n = n;
  config.k = k;
  config.m = m;
  config.model = model;
  config.taus = std::move(taus);
  config.master_seed = seed;
  return config;
}

EnsembleConfig EnsembleConfig::with_ratio(Eigen::Index n, int k, double c,
                                          VectorModel model, TauSpec taus,
                                          std::uint64_t seed) {
  const Eigen::Index dim = checked_dimension(n, k);
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("EnsembleConfig: c must be in (0, inf)");
  }
  const auto m = static_cast<Eigen::Index>(std::llround(c * static_cast<double>(dim)));
  auto config = with_m(n, k, std::max<Eigen::Index>(m, 1), std::move(model),
                       std::move(taus), seed);
  config.c_target = c;
  return config;
}

Eigen::Index EnsembleConfig::dimension() const { return checked_dimension(n, k); }

double EnsembleConfig::concentration() const {
  return static_cast<double>(m) / static_cast<double>(dimension());
}

Eigen::MatrixXd SampleMatrix::dense() const {
  Eigen::MatrixXd m = factors * taus.asDiagonal() * factors.transpose();
  // GEMM roundoff can leave ~1 ulp asymmetry; the model is exactly symmetric.
  m = 0.5 * (m + m.transpose()).eval();
  return m;
}

Eigen::VectorXd SampleMatrix::apply(const Eigen::VectorXd& v) const {
  if (v.size() != factors.rows()) {
    throw std::invalid_argument("SampleMatrix::apply: length mismatch");
  }
  return factors * (taus.array() * (factors.transpose() * v).array()).matrix();
}

double SampleMatrix::trace() const {
  double t = 0.0;
  for (Eigen::Index a = 0; a < factors.cols(); ++a) {
    t += taus[a] * factors.col(a).squaredNorm();
  }
  return t;
}

double SampleMatrix::trace_power(int p) const {
  if (p == 1) return trace();
  if (p != 2) throw std::invalid_argument("SampleMatrix::trace_power: p must be 1 or 2");
  // Tr M^2 = sum_{ab} tau_a tau_b (Y_a, Y_b)^2, valid for any tau signs.
  const Eigen::MatrixXd gram = factors.transpose() * factors;
  const Eigen::VectorXd weighted = taus;
  return weighted.transpose() * gram.cwiseProduct(gram) * weighted;
}

SampleMatrix assemble(const EnsembleConfig& config, PhiloxStream& stream) {
  const Eigen::Index dim = config.dimension();
  const auto budget = static_cast<std::size_t>(dim) * static_cast<std::size_t>(config.m);
  if (budget > kAssembleBudget) {
    throw std::invalid_argument("assemble: N*m exceeds the memory budget");
  }
  SampleMatrix mat;
  mat.n = config.n;
  mat.k = config.k;
  const std::vector<double> taus = realize_taus(config.taus, static_cast<std::size_t>(config.m));
  mat.taus = Eigen::Map<const Eigen::VectorXd>(taus.data(), config.m);
  mat.factors.resize(dim, config.m);
  for (Eigen::Index alpha = 0; alpha < config.m; ++alpha) {
    mat.factors.col(alpha) =
        tensor_sample(config.model, config.n, config.k, stream,
                      static_cast<std::size_t>(dim));
  }
  return mat;
}

Spectrum eigenvalues(const SampleMatrix& mat, EigenPath path) {
  if (!mat.factors.allFinite() || !mat.taus.allFinite()) {
    throw std::invalid_argument("eigenvalues: non-finite entries");
  }
  const Eigen::Index dim = mat.dimension();
  const Eigen::Index m = mat.samples();
  const bool nonneg = (mat.taus.array() >= 0.0).all();
  if (path == EigenPath::Automatic) {
    path = (nonneg && m < dim) ? EigenPath::Gram : EigenPath::Dense;
  }
  if (path == EigenPath::Gram && (!nonneg || m > dim)) {
    throw std::invalid_argument(
        "eigenvalues: Gram path requires tau >= 0 and m <= N");
  }

  Spectrum spec;
  spec.n = mat.n;
  spec.k = mat.k;
  spec.m = m;

  if (path == EigenPath::Gram) {
    if (m > kDenseSolveCap) throw std::invalid_argument("eigenvalues: m exceeds solve cap");
    const Eigen::VectorXd root = mat.taus.cwiseSqrt();
    const Eigen::MatrixXd weighted = mat.factors * root.asDiagonal();
    Eigen::MatrixXd gram = weighted.transpose() * weighted;
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("eigenvalues: Gram eigensolve failed");
    }
    spec.zero_padding = dim - m;
    spec.eigenvalues.assign(static_cast<std::size_t>(dim), 0.0);
    for (Eigen::Index i = 0; i < m; ++i) {
      double lambda = solver.eigenvalues()[i];
      if (std::abs(lambda) < 1e-10) lambda = 0.0;  // exact zeros in exact arithmetic
      spec.eigenvalues[static_cast<std::size_t>(spec.zero_padding + i)] = lambda;
    }
  } else {
    if (dim > kDenseSolveCap) throw std::invalid_argument("eigenvalues: N exceeds solve cap");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat.dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("eigenvalues: dense eigensolve failed");
    }
    spec.eigenvalues.assign(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + dim);
  }
  std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end());

  // Sum rule: sum of eigenvalues must reproduce Tr M.
  double sum = 0.0;
  for (double lambda : spec.eigenvalues) sum += lambda;
  const double tr = mat.trace();
  if (std::abs(sum - tr) > 1e-8 * std::max(1.0, std::abs(tr))) {
    throw std::runtime_error("eigenvalues: trace sum rule violated");
  }
  return spec;
}

double linear_statistic(const Spectrum& spec, const TestFunction& phi) {
  double sum = 0.0;
  std::size_t zeros = 0;
  for (double lambda : spec.eigenvalues) {
    if (lambda == 0.0) {
      ++zeros;
    } else {
      sum += phi(lambda);
    }
  }
  if (zeros > 0) sum += static_cast<double>(zeros) * phi(0.0);
  return sum;
}

std::complex<double> resolvent_trace(const Spectrum& spec, std::complex<double> z) {
  if (z.imag() == 0.0) throw std::invalid_argument("resolvent_trace: Im z == 0");
  std::complex<double> sum = 0.0;
  for (double lambda : spec.eigenvalues) sum += 1.0 / (lambda - z);
  return sum;
}

}  // namespace tensormp
