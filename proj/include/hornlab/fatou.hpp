#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hornlab/error.hpp"
#include "hornlab/maps.hpp"

namespace hornlab {

enum class Direction { attracting, repelling };

struct FatouConfig {
  int series_order = 10;
  double trap_radius = 1e-2;
  double trap_angle = 3.0 * std::numbers::pi / 4.0;
  long max_iterations = 100000;
  double target_tol = 1e-10;
  // Distance |Re w| into the left half-plane at which the repelling series is
  // inverted; 0 selects 2 * series_order.
  double repelling_chart_radius = 0.0;

  double chart_radius() const { return repelling_chart_radius > 0.0 ? repelling_chart_radius : 2.0 * series_order; }
  void validate(const MapSpec& map) const;
};

nlohmann::json to_json(const FatouConfig& cfg);
// Unknown keys are rejected; missing keys keep the values of base.
FatouConfig config_from_json(const nlohmann::json& doc, FatouConfig base = {});

// Truncated asymptotic solution of Phi(f(z)) = Phi(z) + 1:
//   Phi(z) = -1/(a z) - gamma Log(s/(a z)) + sum_{k=1..K} b_k z^k
// with s = -1 (attracting) or +1 (repelling), principal Log, constant term 0.
struct AbelSeries {
  Direction direction = Direction::attracting;
  cplx a;
  cplx gamma;
  std::vector<cplx> coefficients;  // b_1 .. b_K

  int order() const { return int(coefficients.size()); }
  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
};

AbelSeries solve_abel_series(const MapSpec& map, const GermData& germ, int order, Direction direction);

// Coefficients r_0 .. r_max_order of the formal series Phi(f(z)) - Phi(z) - 1.
std::vector<cplx> abel_formal_residual(const MapSpec& map, const AbelSeries& series, int max_order);

// Newton inversion of the series near 0, started at -1/(a w).
cplx invert_series(const AbelSeries& series, cplx w, const FatouConfig& cfg);

enum class BasinStatus { converged, escaped, unknown };

struct BasinVerdict {
  BasinStatus status = BasinStatus::unknown;
  // Trap entry index when converged, exit step when escaped, N_max when unknown.
  long index = 0;
  long orbit_length = 0;
  // The orbit sits on the fixed point itself (0 is not in the open basin).
  bool stationary = false;
};

std::string to_string(BasinStatus status);

// |z| < r and |arg(-c z^p)| < angle, with c the leading coefficient c_{p+1}.
bool in_attracting_trap(cplx leading, int p, cplx z, double radius, double angle);
// |z| < r and |arg(c z^p)| < angle.
bool in_repelling_trap(cplx leading, int p, cplx z, double radius, double angle);

class FatouError : public Error {
 public:
  FatouError(const std::string& what, BasinVerdict verdict) : Error(what), verdict_(verdict) {}
  const BasinVerdict& verdict() const { return verdict_; }

 private:
  BasinVerdict verdict_;
};

struct TrapOrbit {
  BasinVerdict verdict;
  cplx point;  // orbit point at verdict.index
};

// Forward orbit until the attracting trap, the edge of the evaluation disk,
// or N_max.
TrapOrbit orbit_to_trap(const MapSpec& map, cplx leading, int p, cplx z, const FatouConfig& cfg);

struct FatouOutcome {
  BasinVerdict verdict;
  std::optional<cplx> value;
};

FatouOutcome attracting_fatou_outcome(const MapSpec& map, const AbelSeries& series, cplx z, const FatouConfig& cfg);
cplx attracting_fatou(const MapSpec& map, const AbelSeries& series, cplx z, const FatouConfig& cfg);
cplx repelling_fatou(const MapSpec& map, const AbelSeries& series, cplx z, const FatouConfig& cfg);

// Psi_R(w) = f^shift(base) with base = Phi_R^{-1}(w - shift) in the chart.
struct ChartPreimage {
  cplx base;
  long shift;
};

ChartPreimage repelling_chart_preimage(const AbelSeries& series, cplx w, const FatouConfig& cfg, long extra_shift = 0);
cplx repelling_parametrization(const MapSpec& map, const AbelSeries& series, cplx w, const FatouConfig& cfg,
                               long extra_shift = 0);

struct PetalSpec {
  enum class Kind { alpha, very_large };
  Direction direction = Direction::attracting;
  Kind kind = Kind::alpha;
  double alpha = std::numbers::pi / 2.0;
  double chart_radius = 10.0;
  cplx center = 0.0;
};

// Sector/half-plane test in the chart w = -1/(a z). Throws for z = 0.
bool petal_membership(const GermData& germ, const PetalSpec& petal, cplx z);
// Smallest n >= 0 with w + n (attracting) or w - n (repelling) in the chart image.
long brimming_shift(const PetalSpec& petal, cplx w);

// Map + germ data + both normalized series, solved once.
class ParabolicGerm {
 public:
  explicit ParabolicGerm(MapSpec map, FatouConfig cfg = {});

  const MapSpec& map() const { return map_; }
  const GermData& data() const { return data_; }
  const FatouConfig& config() const { return cfg_; }
  const AbelSeries& attracting() const { return attracting_; }
  const AbelSeries& repelling() const { return repelling_; }

  FatouOutcome attracting_outcome(cplx z) const { return attracting_fatou_outcome(map_, attracting_, z, cfg_); }
  cplx attracting_fatou(cplx z) const { return hornlab::attracting_fatou(map_, attracting_, z, cfg_); }
  cplx repelling_fatou(cplx z) const { return hornlab::repelling_fatou(map_, repelling_, z, cfg_); }
  cplx repelling_parametrization(cplx w, long extra_shift = 0) const {
    return hornlab::repelling_parametrization(map_, repelling_, w, cfg_, extra_shift);
  }
  // (Phi_A)^{-1}(w) on the attracting petal: series inversion after moving w
  // right by whole steps, then that many inverse steps of f.
  cplx attracting_parametrization(cplx w) const;

 private:
  MapSpec map_;
  FatouConfig cfg_;
  GermData data_;
  AbelSeries attracting_;
  AbelSeries repelling_;
};

struct AbelCheck {
  double sup;      // max |Phi(f(z)) - Phi(z) - 1|
  int samples;
  int in_trap;     // samples already inside the trap (series evaluated directly)
};

// Samples z = -/+ 1/(a w) with |arg w| < pi/2 and |w| log-uniform in
// [10, 1000] (seeded, so reproducible), then measures the Abel residual of
// the chosen coordinate.
AbelCheck abel_residual_check(const ParabolicGerm& germ, Direction direction, int samples, std::uint64_t seed = 1);

// For degenerate germs (p > 1): plain iteration of the vector-field
// approximant with Richardson extrapolation in n^{-1/p}. No normalization.
cplx exploratory_fatou(const MapSpec& map, const GermData& germ, cplx z, const FatouConfig& cfg);

}  // namespace hornlab
