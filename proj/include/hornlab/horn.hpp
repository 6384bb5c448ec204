#pragma once

#include <optional>
#include <vector>

#include "hornlab/fatou.hpp"

namespace hornlab {

enum class End { plus, minus, interior };

std::string to_string(End end);
End end_from_string(const std::string& name);

// Point of C/Z. The representative has Re in [0, 1).
struct CylinderPoint {
  cplx representative;
  End end_hint = End::interior;

  static CylinderPoint from_lift(cplx w, End hint = End::interior);
  bool operator==(const CylinderPoint& other) const { return representative == other.representative; }
};

// min over k in {-1, 0, 1} of |u - v - k| on canonical representatives.
double cylinder_distance(const CylinderPoint& u, const CylinderPoint& v);

// z = 0 counts as converged with index 0 and the stationary flag set.
BasinVerdict basin_membership(const MapSpec& map, cplx z, const FatouConfig& cfg);

struct HornValue {
  cplx lifted;  // Phi_A^ext(Psi_R^ext(w))
  CylinderPoint point;
  BasinVerdict verdict;
};

// Thrown when Psi_R^ext(w) is not in the immediate basin. verdict() says why.
class OutsideHornDomain : public FatouError {
 public:
  using FatouError::FatouError;
};

// Evaluated on the representative w - floor(Re w), so values at w and w + 1
// agree exactly as cylinder points and their lifts differ by exactly 1.
HornValue horn_map(const ParabolicGerm& germ, cplx w);
std::optional<HornValue> try_horn_map(const ParabolicGerm& germ, cplx w, BasinVerdict* verdict = nullptr);

// -i pi gamma at the plus end, +i pi gamma at the minus end.
cplx horn_asymptote(const GermData& germ, End end);

struct DecayReport {
  End end = End::plus;
  std::vector<double> levels;  // |Im w|
  std::vector<double> errors;  // E(t)
  std::vector<double> ratios;  // E(t_{i+1}) / E(t_i)
  double rate = 0.0;           // least-squares slope of -log E against t
  bool passed = false;         // rate >= 0.8 * 2 pi
};

// E(t) = sup over 16 equispaced Re values of |h(w) - (w + asymptote)| at
// |Im w| = t on the chosen end, with the lift pinned at |Im w| = 6. Levels are
// magnitudes, increasing, each >= 1. Throws OutsideHornDomain on any sample
// outside the domain.
DecayReport expansion_check(const ParabolicGerm& germ, End end, const std::vector<double>& levels);

struct CylinderViewport {
  double re_min = 0.0, re_max = 1.0;
  double im_min = 2.0, im_max = 4.0;
};

// Row 0 is the top row (largest Im); cell centers sit half a step inside.
struct HornDomainGrid {
  CylinderViewport viewport;
  int columns = 0;
  int rows = 0;
  std::vector<BasinVerdict> verdicts;          // row-major
  std::vector<std::optional<cplx>> values;     // lifted h where converged
  // Lowest cell-center Im of the run of all-converged rows starting at the top,
  // and the highest of the run starting at the bottom.
  std::optional<double> plus_threshold;
  std::optional<double> minus_threshold;
  long converged = 0, escaped = 0, unknown = 0;

  cplx cell_center(int column, int row) const;
};

HornDomainGrid domain_probe(const ParabolicGerm& germ, const CylinderViewport& viewport, int columns, int rows,
                            int threads = 0);

nlohmann::json to_json(const HornDomainGrid& grid);
nlohmann::json to_json(const DecayReport& report);

}  // namespace hornlab
