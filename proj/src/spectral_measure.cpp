#include "tensormp/spectral_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tensormp/common.hpp"

namespace tensormp {

namespace {

void validate_tau_value(double v, const char* who) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite tau value");
  if (std::abs(v) > kTauBound) {
    throw std::invalid_argument(std::string(who) + ": |tau| exceeds bound 1e6");
  }
}

}  // namespace

SpectralMeasure SpectralMeasure::from_atoms(std::vector<MeasureAtom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("SpectralMeasure: no atoms");
  double mass = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    validate_tau_value(atoms[i].value, "SpectralMeasure");
    if (!(atoms[i].mass > 0.0)) throw std::invalid_argument("SpectralMeasure: mass <= 0");
    if (i > 0 && !(atoms[i].value > atoms[i - 1].value)) {
      throw std::invalid_argument("SpectralMeasure: values not strictly increasing");
    }
    mass += atoms[i].mass;
  }
  if (std::abs(mass - 1.0) > 1e-12) {
    throw std::invalid_argument("SpectralMeasure: total mass != 1");
  }
  return SpectralMeasure(std::move(atoms));
}

SpectralMeasure SpectralMeasure::point_mass(double value) {
  return from_atoms({{value, 1.0}});
}

double SpectralMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.mass;
  return m;
}

double measure_moment(const SpectralMeasure& mu, int p) {
  if (p < 0 || p > 8) throw std::invalid_argument("measure_moment: p outside [0, 8]");
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += std::pow(a.value, p) * a.mass;
  return s;
}

TauSpec TauSpec::constant(double value) {
  validate_tau_value(value, "TauSpec::constant");
  TauSpec spec;
  spec.kind_ = TauKind::Constant;
  spec.value_ = value;
  return spec;
}

TauSpec TauSpec::explicit_list(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("TauSpec::explicit_list: empty list");
  for (double v : values) validate_tau_value(v, "TauSpec::explicit_list");
  TauSpec spec;
  spec.kind_ = TauKind::ExplicitList;
  spec.values_ = std::move(values);
  return spec;
}

TauSpec TauSpec::discrete(std::vector<MeasureAtom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const MeasureAtom& a, const MeasureAtom& b) { return a.value < b.value; });
  // from_atoms re-validates masses, ordering and the unit total.
  SpectralMeasure::from_atoms(atoms);
  TauSpec spec;
  spec.kind_ = TauKind::DiscreteMeasure;
  spec.atoms_ = std::move(atoms);
  return spec;
}

SpectralMeasure TauSpec::limit_measure() const {
  switch (kind_) {
    case TauKind::Constant:
      return SpectralMeasure::point_mass(value_);
    case TauKind::ExplicitList:
      return ncm(values_);
    case TauKind::DiscreteMeasure:
      return SpectralMeasure::from_atoms(atoms_);
  }
  throw std::logic_error("TauSpec: bad kind");
}

std::vector<double> realize_taus(const TauSpec& spec, std::size_t m) {
  if (m < 1) throw std::invalid_argument("realize_taus: m < 1");
  switch (spec.kind()) {
    case TauKind::Constant:
      return std::vector<double>(m, spec.value());
    case TauKind::ExplicitList:
      if (spec.values().size() != m) {
        throw std::invalid_argument("realize_taus: length mismatch");
      }
      return spec.values();
    case TauKind::DiscreteMeasure:
      break;
  }
  // Largest-remainder quotas: floor everyone, then hand the leftover counts
  // to the largest fractional parts (first atom wins ties).
  const auto& atoms = spec.atoms();
  std::vector<std::size_t> counts(atoms.size());
  std::vector<double> remainders(atoms.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double quota = atoms[i].mass * static_cast<double>(m);
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainders[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t j = 0; assigned < m; ++j) {
    ++counts[order[j % order.size()]];
    ++assigned;
  }
  std::vector<double> out;
  out.reserve(m);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    out.insert(out.end(), counts[i], atoms[i].value);
  }
  return out;
}

SpectralMeasure ncm(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("ncm: empty value list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<MeasureAtom> atoms;
  const double w = 1.0 / static_cast<double>(sorted.size());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    atoms.push_back({sorted[i], w * static_cast<double>(j - i)});
    i = j;
  }
  return SpectralMeasure::from_atoms(std::move(atoms));
}

}  // namespace tensormp
