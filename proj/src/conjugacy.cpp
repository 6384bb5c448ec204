#include "hornlab/conjugacy.hpp"

#include <algorithm>
#include <cmath>

#include "hornlab/catalog.hpp"
#include "hornlab/parallel.hpp"

namespace hornlab {

Pairing::Pairing(const SemiConjugacySpec& spec, const FatouConfig& cfg)
    : source(spec.source, cfg), target(spec.target, cfg), phi(spec.phi) {}

namespace {

std::vector<cplx> petal_samples(const GermData& germ, int count, double w_min, double w_max, double half_angle,
                                double sign) {
  if (count < 0) throw InvalidArgument("sample count must be non-negative");
  if (!(w_min > 0.0) || !(w_max >= w_min)) throw InvalidArgument("petal sample radii must satisfy 0 < min <= max");
  const int side = int(std::ceil(std::sqrt(double(count))));
  std::vector<cplx> out;
  out.reserve(count);
  for (int i = 0; i < side && int(out.size()) < count; ++i) {
    const double s = side > 1 ? double(i) / (side - 1) : 0.5;
    const double modulus = w_min * std::pow(w_max / w_min, s);
    for (int j = 0; j < side && int(out.size()) < count; ++j) {
      const double t = side > 1 ? double(j) / (side - 1) : 0.5;
      const cplx w = std::polar(modulus, half_angle * (2.0 * t - 1.0));
      out.push_back(sign / (germ.a * w));
    }
  }
  return out;
}

double max_deviation(const std::vector<cplx>& values, cplx mean) {
  double out = 0.0;
  for (cplx v : values) out = std::max(out, std::abs(v - mean));
  return out;
}

End end_of(cplx w) { return w.imag() > 0.0 ? End::plus : (w.imag() < 0.0 ? End::minus : End::interior); }

}  // namespace

std::vector<cplx> attracting_petal_samples(const GermData& germ, int count, double w_min, double w_max,
                                           double half_angle) {
  return petal_samples(germ, count, w_min, w_max, half_angle, -1.0);
}

std::vector<cplx> repelling_petal_samples(const GermData& germ, int count, double w_min, double w_max,
                                          double half_angle) {
  return petal_samples(germ, count, w_min, w_max, half_angle, 1.0);
}

double semi_conjugacy_residual(const MapSpec& source, const MapSpec& target, const std::function<cplx(cplx)>& phi,
                               const std::vector<cplx>& samples) {
  double out = 0.0;
  for (cplx z : samples) out = std::max(out, std::abs(phi(evaluate(source, z)) - evaluate(target, phi(z))));
  return out;
}

double semi_conjugacy_residual(const SemiConjugacySpec& spec, const std::vector<cplx>& samples) {
  return semi_conjugacy_residual(spec.source, spec.target, [&](cplx z) { return evaluate(spec.phi, z); }, samples);
}

PhaseShift lifted_phase_shift(const Pairing& pairing, int samples, double threshold) {
  if (samples < 1) throw InvalidArgument("phase shift needs at least one sample");
  const auto points = attracting_petal_samples(pairing.source.data(), samples);
  std::vector<cplx> shifts;
  shifts.reserve(points.size());
  cplx mean = 0.0;
  for (cplx z : points) {
    const FatouOutcome image = pairing.target.attracting_outcome(evaluate(pairing.phi, z));
    if (!image.value) {
      throw VerificationFailure("phi maps a petal sample outside the target basin (" +
                                to_string(image.verdict.status) + ")");
    }
    shifts.push_back(*image.value - pairing.source.attracting_fatou(z));
    mean += shifts.back();
  }
  mean /= double(shifts.size());
  const PhaseShift out{mean, max_deviation(shifts, mean), int(shifts.size())};
  if (!(out.deviation <= threshold)) {
    throw VerificationFailure("phase shift is not constant: deviation " + std::to_string(out.deviation));
  }
  return out;
}

PsiValue extract_psi(const Pairing& pairing, cplx w) {
  const FatouConfig& cfg = pairing.source.config();
  const FatouConfig& target_cfg = pairing.target.config();
  const cplx a2 = pairing.target.data().a;
  const long first = std::max(0L, long(std::ceil(w.real() + cfg.chart_radius())));

  // Value at shift n, or nothing when phi(Psi_R^1(w - n)) is not yet trapped.
  auto value_at = [&](long n) -> std::optional<cplx> {
    const cplx z = invert_series(pairing.source.repelling(), w - double(n), cfg);
    const cplx image = evaluate(pairing.phi, z);
    if (!in_repelling_trap(a2, 1, image, target_cfg.trap_radius, target_cfg.trap_angle)) return std::nullopt;
    return pairing.target.repelling()(image) + double(n);
  };

  for (long n = first; n <= first + cfg.max_iterations; ++n) {
    const auto v0 = value_at(n);
    if (!v0) continue;
    const auto v1 = value_at(n + 1);
    const auto v2 = value_at(n + 2);
    if (v1 && v2 && std::abs(*v1 - *v0) <= cfg.target_tol && std::abs(*v2 - *v0) <= cfg.target_tol) return {*v0, n};
  }
  throw VerificationFailure("no admissible shift: phi of the repelling chart never settles in the target trap");
}

std::vector<std::pair<cplx, End>> SampleGrid::points() const {
  std::vector<std::pair<cplx, End>> out;
  const double dx = (re_max - re_min) / columns;
  for (End end : {End::plus, End::minus}) {
    if ((end == End::plus && !plus) || (end == End::minus && !minus)) continue;
    const double sign = end == End::plus ? 1.0 : -1.0;
    for (double t : levels) {
      for (int j = 0; j < columns; ++j) out.push_back({{re_min + (j + 0.5) * dx, sign * t}, end});
    }
  }
  return out;
}

std::vector<double> band_levels(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(count > 1 ? lo + (hi - lo) * i / (count - 1) : 0.5 * (lo + hi));
  return out;
}

double psi_translation_defect(const EquivalenceReport& report, double lo, double hi) {
  double out = 0.0;
  for (const auto& s : report.samples) {
    const double t = std::abs(s.w.imag());
    if (!s.psi || t < lo || t > hi) continue;
    const cplx rho = s.end == End::plus ? report.rho_plus : report.rho_minus;
    out = std::max(out, std::abs(*s.psi - s.w - rho));
  }
  return out;
}

EquivalenceReport verify_equivalence(const Pairing& pairing, const SampleGrid& grid, int threads) {
  if (grid.columns < 1 || grid.levels.empty()) throw InvalidArgument("sample grid is empty");
  EquivalenceReport report;
  report.grid = grid;
  const PhaseShift shift = lifted_phase_shift(pairing, 64, std::numeric_limits<double>::infinity());
  report.sigma_lifted = shift.lifted;
  report.sigma = CylinderPoint::from_lift(shift.lifted);
  report.sigma_deviation = shift.deviation;

  const auto points = grid.points();
  report.samples.resize(points.size());
  const int rows = int(points.size()) / grid.columns;
  for_each_row(rows, threads, [&](int r) {
    for (int c = 0; c < grid.columns; ++c) {
      const std::size_t i = std::size_t(r) * grid.columns + c;
      EquivalenceSample& s = report.samples[i];
      s.w = points[i].first;
      s.end = points[i].second;
      try {
        s.psi = extract_psi(pairing, s.w).value;
      } catch (const Error&) {
      }
      if (auto h1 = try_horn_map(pairing.source, s.w)) s.h1 = h1->lifted;
      if (s.psi) {
        if (auto h2 = try_horn_map(pairing.target, *s.psi)) s.h2 = h2->lifted;
      }
      if (s.h1 && s.h2) {
        s.residual = cylinder_distance(CylinderPoint::from_lift(*s.h1 + report.sigma_lifted),
                                       CylinderPoint::from_lift(*s.h2));
      }
    }
  });

  for (const auto& s : report.samples) {
    if (std::isnan(s.residual)) {
      ++report.masked;
    } else {
      ++report.compared;
      report.residual_sup = std::max(report.residual_sup, s.residual);
    }
  }

  // rho from the three largest levels of each end.
  std::vector<double> sorted = grid.levels;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double cutoff = sorted[std::min<std::size_t>(2, sorted.size() - 1)];
  for (End end : {End::plus, End::minus}) {
    cplx sum = 0.0;
    int n = 0;
    for (const auto& s : report.samples) {
      if (s.end == end && s.psi && std::abs(s.w.imag()) >= cutoff) {
        sum += *s.psi - s.w;
        ++n;
      }
    }
    (end == End::plus ? report.rho_plus : report.rho_minus) = n > 0 ? sum / double(n) : cplx(0.0);
  }
  const double lo = *std::min_element(grid.levels.begin(), grid.levels.end());
  const double hi = sorted.front();
  report.psi_translation_defect = psi_translation_defect(report, 0.5 * (lo + hi), hi);
  return report;
}

nlohmann::json to_json(const EquivalenceReport& report) {
  auto opt = [](const std::optional<cplx>& v) { return v ? complex_to_json(*v) : nlohmann::json(nullptr); };
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : report.samples) {
    samples.push_back({{"w", complex_to_json(s.w)},
                       {"end", to_string(s.end)},
                       {"psi", opt(s.psi)},
                       {"h1", opt(s.h1)},
                       {"h2", opt(s.h2)},
                       {"residual", std::isnan(s.residual) ? nlohmann::json(nullptr) : nlohmann::json(s.residual)}});
  }
  return {{"sigma_lifted", complex_to_json(report.sigma_lifted)},
          {"sigma", complex_to_json(report.sigma.representative)},
          {"sigma_deviation", report.sigma_deviation},
          {"rho_plus", complex_to_json(report.rho_plus)},
          {"rho_minus", complex_to_json(report.rho_minus)},
          {"residual_sup", report.residual_sup},
          {"psi_translation_defect", report.psi_translation_defect},
          {"compared", report.compared},
          {"masked", report.masked},
          {"sample_grid",
           {{"columns", report.grid.columns},
            {"re_min", report.grid.re_min},
            {"re_max", report.grid.re_max},
            {"levels", report.grid.levels},
            {"plus", report.grid.plus},
            {"minus", report.grid.minus}}},
          {"samples", samples}};
}

std::string to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::attracting:
      return "attracting";
    case ChartKind::repelling:
      return "repelling";
    case ChartKind::overlap:
      return "overlap";
    case ChartKind::out_of_range:
      return "out_of_range";
  }
  return "out_of_range";
}

PhiEvaluator::PhiEvaluator(ParabolicGerm source, ParabolicGerm target, cplx sigma, Psi psi, double chart_level)
    : source_(std::move(source)),
      target_(std::move(target)),
      sigma_(sigma),
      psi_(std::move(psi)),
      radius_(1.0 / (std::abs(source_.data().a) * chart_level)) {
  if (!(chart_level > 0.0)) throw InvalidArgument("chart level must be positive");
  if (!psi_) throw InvalidArgument("psi callable is empty");
}

ChartKind PhiEvaluator::classify(cplx z) const {
  if (z == 0.0) return ChartKind::out_of_range;
  const cplx a = source_.data().a;
  const double angle = source_.config().trap_angle;
  const bool attracting = in_attracting_trap(a, 1, z, radius_, angle);
  const bool repelling = in_repelling_trap(a, 1, z, radius_, angle);
  if (attracting && repelling) return ChartKind::overlap;
  if (attracting) return ChartKind::attracting;
  if (repelling) return ChartKind::repelling;
  return ChartKind::out_of_range;
}

cplx PhiEvaluator::evaluate_attracting(cplx z) const {
  return target_.attracting_parametrization(source_.attracting_fatou(z) + sigma_);
}

cplx PhiEvaluator::evaluate_repelling(cplx z) const {
  const cplx w = source_.repelling_fatou(z);
  return target_.repelling_parametrization(psi_(w, end_of(w)));
}

cplx PhiEvaluator::evaluate(cplx z) const {
  switch (classify(z)) {
    case ChartKind::attracting:
    case ChartKind::overlap:
      return evaluate_attracting(z);
    case ChartKind::repelling:
      return evaluate_repelling(z);
    case ChartKind::out_of_range:
      break;
  }
  throw InvalidArgument("point lies outside both charts of the rebuilt map");
}

std::vector<cplx> PhiEvaluator::overlap_samples(int per_component) const {
  const double level = 1.0 / (std::abs(source_.data().a) * radius_);
  std::vector<cplx> out;
  for (double sign : {1.0, -1.0}) {
    for (int i = 0; i < per_component; ++i) {
      const double s = per_component > 1 ? double(i) / (per_component - 1) : 0.5;
      // Chart values near the imaginary axis, tilted alternately either way.
      const double modulus = 1.25 * level * std::pow(3.0, s);
      const double tilt = i % 2 == 0 ? 0.2 : -0.2;
      const cplx w = std::polar(modulus, sign * (std::numbers::pi / 2.0 + tilt));
      out.push_back(-1.0 / (source_.data().a * w));
    }
  }
  return out;
}

double PhiEvaluator::overlap_mismatch(const std::vector<cplx>& samples) const {
  double out = 0.0;
  for (cplx z : samples) out = std::max(out, std::abs(evaluate_attracting(z) - evaluate_repelling(z)));
  return out;
}

PhiEvaluator build_phi(const ParabolicGerm& source, const ParabolicGerm& target, cplx sigma, PhiEvaluator::Psi psi,
                       double overlap_tol) {
  PhiEvaluator phi(source, target, sigma, std::move(psi));
  const double mismatch = phi.overlap_mismatch(phi.overlap_samples(16));
  if (!(mismatch <= overlap_tol)) {
    throw VerificationFailure("attracting and repelling branches disagree on the overlap by " +
                              std::to_string(mismatch));
  }
  return phi;
}

}  // namespace hornlab
