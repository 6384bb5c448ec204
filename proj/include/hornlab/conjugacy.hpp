#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hornlab/horn.hpp"

namespace hornlab {

struct SemiConjugacySpec {
  MapSpec source;  // f1
  MapSpec target;  // f2
  MapSpec phi;     // phi o f1 = f2 o phi near the attracting axis
};

// Source and target germs solved once, plus phi.
struct Pairing {
  Pairing(const SemiConjugacySpec& spec, const FatouConfig& cfg = {});

  ParabolicGerm source;
  ParabolicGerm target;
  MapSpec phi;
};

// z = -1/(a w) for w on a lattice with |w| in [w_min, w_max] (geometric) and
// |arg w| <= half_angle; count points, row-major. The repelling variant uses
// z = 1/(a w).
std::vector<cplx> attracting_petal_samples(const GermData& germ, int count, double w_min = 10.0,
                                           double w_max = 40.0, double half_angle = std::numbers::pi / 4.0);
std::vector<cplx> repelling_petal_samples(const GermData& germ, int count, double w_min = 10.0,
                                          double w_max = 40.0, double half_angle = std::numbers::pi / 4.0);

// max |phi(f1(z)) - f2(phi(z))| over the samples.
double semi_conjugacy_residual(const MapSpec& source, const MapSpec& target, const std::function<cplx(cplx)>& phi,
                               const std::vector<cplx>& samples);
double semi_conjugacy_residual(const SemiConjugacySpec& spec, const std::vector<cplx>& samples);

struct PhaseShift {
  cplx lifted;       // mean of Phi_A^2(phi(z)) - Phi_A^1(z)
  double deviation;  // max distance of a sample from the mean
  int samples;
};

// Throws VerificationFailure when phi(z) leaves the target basin or the
// deviation exceeds threshold.
PhaseShift lifted_phase_shift(const Pairing& pairing, int samples = 64, double threshold = 1e-8);

struct PsiValue {
  cplx value;  // lifted psi(w)
  long shift;  // the n that was used
};

// psi(w) = Phi_R^2(phi(Psi_R^1(w - n))) + n for the smallest n from the chart
// shift on such that phi(...) sits in the target repelling trap and n + 1,
// n + 2 reproduce the value within target_tol.
PsiValue extract_psi(const Pairing& pairing, cplx w);

struct SampleGrid {
  int columns = 20;
  double re_min = 0.0, re_max = 1.0;
  std::vector<double> levels;  // |Im w|, used on each selected end
  bool plus = true;
  bool minus = true;

  // Column centers at re_min + (j + 1/2) dx.
  std::vector<std::pair<cplx, End>> points() const;
};

// levels equispaced on [lo, hi], endpoints included.
std::vector<double> band_levels(double lo, double hi, int count);

struct EquivalenceSample {
  cplx w;
  End end;
  std::optional<cplx> psi;
  std::optional<cplx> h1;  // lifted h1(w)
  std::optional<cplx> h2;  // lifted h2(psi(w))
  double residual = std::numeric_limits<double>::quiet_NaN();
};

struct EquivalenceReport {
  cplx sigma_lifted;
  CylinderPoint sigma;
  double sigma_deviation = 0.0;
  cplx rho_plus = 0.0, rho_minus = 0.0;
  double residual_sup = 0.0;            // over samples where both sides exist
  double psi_translation_defect = 0.0;  // upper half of the |Im| range
  long compared = 0;                    // samples contributing to residual_sup
  long masked = 0;                      // samples outside a horn-map domain or without psi
  SampleGrid grid;
  std::vector<EquivalenceSample> samples;
};

// sup |psi(w) - w - rho| over samples with |Im w| in [lo, hi], rho taken per end.
double psi_translation_defect(const EquivalenceReport& report, double lo, double hi);

EquivalenceReport verify_equivalence(const Pairing& pairing, const SampleGrid& grid, int threads = 0);

nlohmann::json to_json(const EquivalenceReport& report);

enum class ChartKind { attracting, repelling, overlap, out_of_range };
std::string to_string(ChartKind kind);

// phi rebuilt from (sigma, psi): on the attracting petal of f1
// (Phi_A^2)^{-1}(Phi_A^1(z) + sigma), on the repelling petal
// Psi_R^{2,ext}(psi(Phi_R^1(z))). sigma is the lift with
// Phi_A^2 o phi = Phi_A^1 + sigma.
class PhiEvaluator {
 public:
  using Psi = std::function<cplx(cplx, End)>;

  PhiEvaluator(ParabolicGerm source, ParabolicGerm target, cplx sigma, Psi psi, double chart_level = 8.0);

  ChartKind classify(cplx z) const;
  cplx evaluate(cplx z) const;  // attracting branch wins on the overlap
  cplx evaluate_attracting(cplx z) const;
  cplx evaluate_repelling(cplx z) const;

  // Points of the two overlap components, |Phi| in [1.25, 3.75] x chart_level.
  std::vector<cplx> overlap_samples(int per_component) const;
  double overlap_mismatch(const std::vector<cplx>& samples) const;

  const ParabolicGerm& source() const { return source_; }
  const ParabolicGerm& target() const { return target_; }

 private:
  ParabolicGerm source_;
  ParabolicGerm target_;
  cplx sigma_;
  Psi psi_;
  double radius_;
};

// Builds the evaluator and checks the gluing on 2 x 16 overlap points; throws
// VerificationFailure above overlap_tol.
PhiEvaluator build_phi(const ParabolicGerm& source, const ParabolicGerm& target, cplx sigma, PhiEvaluator::Psi psi,
                       double overlap_tol = 1e-8);

}  // namespace hornlab
