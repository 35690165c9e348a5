#pragma once

// The tau side of the ensemble: finite coefficient sequences {tau_alpha},
// their normalized counting measure, and discrete limit measures with
// moments.  All value types here are immutable after construction and safe
// to share across threads.

#include <span>
#include <vector>

namespace tensormp {

struct MeasureAtom {
  double value = 0.0;
  double mass = 0.0;
};

// Discrete probability measure with strictly increasing atom values; total
// mass must equal 1 within 1e-12.
class SpectralMeasure {
 public:
  static SpectralMeasure from_atoms(std::vector<MeasureAtom> atoms);
  static SpectralMeasure point_mass(double value);

  const std::vector<MeasureAtom>& atoms() const { return atoms_; }
  double total_mass() const;
  double min_value() const { return atoms_.front().value; }
  double max_value() const { return atoms_.back().value; }

 private:
  explicit SpectralMeasure(std::vector<MeasureAtom> atoms)
      : atoms_(std::move(atoms)) {}
  std::vector<MeasureAtom> atoms_;
};

// integral tau^p dmu(tau); p in [0, 8] (eighth moments are the most the
// moment conditions ever ask for).
double measure_moment(const SpectralMeasure& mu, int p);

enum class TauKind { Constant, ExplicitList, DiscreteMeasure };

// Specification of the tau sequence.  Constant and DiscreteMeasure describe a
// limit measure to be realized at any m; ExplicitList pins the sequence.
class TauSpec {
 public:
  static TauSpec constant(double value);
  static TauSpec explicit_list(std::vector<double> values);
  static TauSpec discrete(std::vector<MeasureAtom> atoms);

  TauKind kind() const { return kind_; }
  double value() const { return value_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<MeasureAtom>& atoms() const { return atoms_; }

  // The measure the realized sequences converge to (for ExplicitList, the
  // NCM of the list itself).
  SpectralMeasure limit_measure() const;

 private:
  TauKind kind_ = TauKind::Constant;
  double value_ = 1.0;
  std::vector<double> values_;
  std::vector<MeasureAtom> atoms_;
};

// Produces exactly m coefficients whose NCM approximates the spec's measure.
// DiscreteMeasure uses largest-remainder quota rounding (ties broken toward
// the smaller atom value), so the Kolmogorov distance to the target is at
// most (#atoms)/m.
std::vector<double> realize_taus(const TauSpec& spec, std::size_t m);

// Normalized counting measure of a value list: mass count(v)/m at each
// distinct value.
SpectralMeasure ncm(std::span<const double> values);

}  // namespace tensormp
