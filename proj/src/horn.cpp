#include "hornlab/horn.hpp"

#include <cmath>

#include "hornlab/parallel.hpp"

namespace hornlab {

std::string to_string(End end) {
  switch (end) {
    case End::plus:
      return "plus";
    case End::minus:
      return "minus";
    case End::interior:
      return "interior";
  }
  return "interior";
}

End end_from_string(const std::string& name) {
  if (name == "plus" || name == "+") return End::plus;
  if (name == "minus" || name == "-") return End::minus;
  if (name == "interior") return End::interior;
  throw InvalidArgument("unknown cylinder end '" + name + "'");
}

CylinderPoint CylinderPoint::from_lift(cplx w, End hint) {
  double re = w.real() - std::floor(w.real());
  if (re >= 1.0) re = 0.0;  // -tiny - floor(-tiny) rounds to 1
  return {{re, w.imag()}, hint};
}

double cylinder_distance(const CylinderPoint& u, const CylinderPoint& v) {
  const cplx d = u.representative - v.representative;
  double best = std::abs(d);
  for (double k : {-1.0, 1.0}) best = std::min(best, std::abs(d - k));
  return best;
}

BasinVerdict basin_membership(const MapSpec& map, cplx z, const FatouConfig& cfg) {
  if (z == 0.0) return {BasinStatus::converged, 0, 0, true};
  const GermData germ = germ_data(map);
  return orbit_to_trap(map, germ.leading, germ.degeneracy_p, z, cfg).verdict;
}

namespace {

End end_of(cplx w) {
  if (w.imag() > 0.0) return End::plus;
  if (w.imag() < 0.0) return End::minus;
  return End::interior;
}

}  // namespace

std::optional<HornValue> try_horn_map(const ParabolicGerm& germ, cplx w, BasinVerdict* verdict) {
  const double k = std::floor(w.real());
  const cplx wc{w.real() - k, w.imag()};
  BasinVerdict local;
  BasinVerdict& out = verdict ? *verdict : local;
  cplx z;
  try {
    z = germ.repelling_parametrization(wc);
  } catch (const FatouError& e) {
    out = e.verdict();
    return std::nullopt;
  } catch (const Error&) {
    out = {BasinStatus::unknown, 0, 0, false};
    return std::nullopt;
  }
  const FatouOutcome outcome = germ.attracting_outcome(z);
  out = outcome.verdict;
  if (!outcome.value) return std::nullopt;
  return HornValue{*outcome.value + k, CylinderPoint::from_lift(*outcome.value, end_of(w)), outcome.verdict};
}

HornValue horn_map(const ParabolicGerm& germ, cplx w) {
  BasinVerdict verdict;
  auto value = try_horn_map(germ, w, &verdict);
  if (!value) {
    throw OutsideHornDomain("w = (" + std::to_string(w.real()) + ", " + std::to_string(w.imag()) +
                                ") lies outside the horn-map domain (" + to_string(verdict.status) + ")",
                            verdict);
  }
  return *value;
}

cplx horn_asymptote(const GermData& germ, End end) {
  const cplx shift = cplx(0.0, std::numbers::pi) * germ.gamma;
  return end == End::minus ? shift : -shift;
}

DecayReport expansion_check(const ParabolicGerm& germ, End end, const std::vector<double>& levels) {
  if (end == End::interior) throw InvalidArgument("expansion_check needs the plus or minus end");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 1.0)) throw InvalidArgument("expansion levels must be >= 1");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw InvalidArgument("expansion levels must increase");
  }
  const double sign = end == End::plus ? 1.0 : -1.0;
  const cplx shift = horn_asymptote(germ.data(), end);
  constexpr int kSamples = 16;
  constexpr double kPinLevel = 6.0;

  DecayReport report;
  report.end = end;
  report.levels = levels;
  for (double t : levels) {
    double sup = 0.0;
    for (int j = 0; j < kSamples; ++j) {
      const double re = double(j) / kSamples;
      // The lift at the pin level decides the integer offset; the lifted
      // horn map is continuous along the vertical ray, so it carries down.
      const cplx top{re, sign * kPinLevel};
      const double offset = std::round((top + shift - horn_map(germ, top).lifted).real());
      const cplx w{re, sign * t};
      sup = std::max(sup, std::abs(horn_map(germ, w).lifted + offset - (w + shift)));
    }
    report.errors.push_back(sup);
  }
  for (std::size_t i = 1; i < report.errors.size(); ++i) report.ratios.push_back(report.errors[i] / report.errors[i - 1]);
  if (levels.size() >= 2) {
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      mt += levels[i];
      my += -std::log(report.errors[i]);
    }
    mt /= double(levels.size());
    my /= double(levels.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      num += (levels[i] - mt) * (-std::log(report.errors[i]) - my);
      den += (levels[i] - mt) * (levels[i] - mt);
    }
    report.rate = num / den;
  }
  report.passed = levels.size() >= 2 && report.rate >= 0.8 * 2.0 * std::numbers::pi;
  return report;
}

cplx HornDomainGrid::cell_center(int column, int row) const {
  const double dx = (viewport.re_max - viewport.re_min) / columns;
  const double dy = (viewport.im_max - viewport.im_min) / rows;
  return {viewport.re_min + (column + 0.5) * dx, viewport.im_max - (row + 0.5) * dy};
}

HornDomainGrid domain_probe(const ParabolicGerm& germ, const CylinderViewport& viewport, int columns, int rows,
                            int threads) {
  if (columns < 0 || rows < 0 || columns > 8192 || rows > 8192) {
    throw InvalidArgument("domain grid resolution must be within 8192 x 8192");
  }
  if (!(viewport.re_max > viewport.re_min) || !(viewport.im_max > viewport.im_min)) {
    throw InvalidArgument("empty cylinder viewport");
  }
  HornDomainGrid grid;
  grid.viewport = viewport;
  grid.columns = columns;
  grid.rows = rows;
  grid.verdicts.resize(std::size_t(columns) * rows);
  grid.values.resize(grid.verdicts.size());
  for_each_row(rows, threads, [&](int r) {
    for (int c = 0; c < columns; ++c) {
      const std::size_t i = std::size_t(r) * columns + c;
      auto value = try_horn_map(germ, grid.cell_center(c, r), &grid.verdicts[i]);
      if (value) grid.values[i] = value->lifted;
    }
  });

  auto row_converged = [&](int r) {
    for (int c = 0; c < columns; ++c) {
      if (grid.verdicts[std::size_t(r) * columns + c].status != BasinStatus::converged) return false;
    }
    return columns > 0;
  };
  for (int r = 0; r < rows && row_converged(r); ++r) grid.plus_threshold = grid.cell_center(0, r).imag();
  for (int r = rows - 1; r >= 0 && row_converged(r); --r) grid.minus_threshold = grid.cell_center(0, r).imag();
  for (const auto& v : grid.verdicts) {
    if (v.status == BasinStatus::converged) ++grid.converged;
    else if (v.status == BasinStatus::escaped) ++grid.escaped;
    else ++grid.unknown;
  }
  return grid;
}

nlohmann::json to_json(const HornDomainGrid& grid) {
  nlohmann::json verdicts = nlohmann::json::array();
  for (int r = 0; r < grid.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < grid.columns; ++c) row.push_back(to_string(grid.verdicts[std::size_t(r) * grid.columns + c].status));
    verdicts.push_back(row);
  }
  auto optional_number = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"viewport",
           {{"re_min", grid.viewport.re_min},
            {"re_max", grid.viewport.re_max},
            {"im_min", grid.viewport.im_min},
            {"im_max", grid.viewport.im_max}}},
          {"columns", grid.columns},
          {"rows", grid.rows},
          {"verdicts", verdicts},
          {"plus_threshold", optional_number(grid.plus_threshold)},
          {"minus_threshold", optional_number(grid.minus_threshold)},
          {"counts", {{"converged", grid.converged}, {"escaped", grid.escaped}, {"unknown", grid.unknown}}}};
}

nlohmann::json to_json(const DecayReport& report) {
  return {{"end", to_string(report.end)}, {"levels", report.levels}, {"errors", report.errors},
          {"ratios", report.ratios},      {"rate", report.rate},     {"passed", report.passed}};
}

}  // namespace hornlab
