#include "hornlab/fatou.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace hornlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

using Series = std::vector<cplx>;  // coefficient of z^k at index k

Series multiply(const Series& x, const Series& y, std::size_t length) {
  Series out(length, 0.0);
  for (std::size_t i = 0; i < x.size() && i < length; ++i) {
    if (x[i] == 0.0) continue;
    for (std::size_t j = 0; j < y.size() && i + j < length; ++j) out[i + j] += x[i] * y[j];
  }
  return out;
}

// 1/g for g[0] = 1.
Series reciprocal(const Series& g, std::size_t length) {
  Series out(length, 0.0);
  out[0] = 1.0;
  for (std::size_t n = 1; n < length; ++n) {
    cplx acc = 0.0;
    for (std::size_t k = 1; k <= n && k < g.size(); ++k) acc += g[k] * out[n - k];
    out[n] = -acc;
  }
  return out;
}

// log g for g[0] = 1, via (log g)' = g'/g.
Series logarithm(const Series& g, std::size_t length) {
  Series dg(length, 0.0);
  for (std::size_t k = 1; k < g.size() && k - 1 < length; ++k) dg[k - 1] = double(k) * g[k];
  const Series q = multiply(dg, reciprocal(g, length), length);
  Series out(length, 0.0);
  for (std::size_t k = 1; k < length; ++k) out[k] = q[k - 1] / double(k);
  return out;
}

// Pieces of Phi(f) - Phi - 1 that do not depend on the b_k, plus the series
// f^k - z^k that multiply each b_k.
struct AbelSystem {
  Series base;
  std::vector<Series> powers;  // powers[k] = f^k - z^k, k = 1..K
};

AbelSystem abel_system(const MapSpec& map, cplx a, cplx gamma, int order, int max_degree) {
  const std::size_t length = std::size_t(max_degree) + 1;
  // f(z) = z g(z) needs c_1 .. c_{max_degree + 2}
  const auto c = detail::taylor_series(map, max_degree + 2);
  Series g(length + 1, 0.0);
  for (std::size_t k = 0; k < g.size() && k < c.size(); ++k) g[k] = c[k];
  g[0] = 1.0;
  const Series inv = reciprocal(g, length + 1);
  const Series lg = logarithm(g, length);

  AbelSystem sys;
  sys.base.assign(length, 0.0);
  // -(1/(a z)) (1/g - 1) - 1
  for (std::size_t m = 0; m < length; ++m) sys.base[m] = -inv[m + 1] / a;
  sys.base[0] -= 1.0;
  // -gamma [Log(s/(a f)) - Log(s/(a z))] = gamma log g
  for (std::size_t m = 0; m < length; ++m) sys.base[m] += gamma * lg[m];

  Series f(length, 0.0);
  for (std::size_t k = 1; k < length && k - 1 < c.size(); ++k) f[k] = c[k - 1];
  sys.powers.assign(std::size_t(order) + 1, Series(length, 0.0));
  Series fk(length, 0.0);
  fk[0] = 1.0;
  for (int k = 1; k <= order; ++k) {
    fk = multiply(fk, f, length);
    sys.powers[k] = fk;
    if (std::size_t(k) < length) sys.powers[k][k] -= 1.0;
  }
  return sys;
}

double arg_abs(cplx z) { return std::abs(std::arg(z)); }

cplx inverse_guess(cplx a, cplx b, cplx z) { return z - a * z * z + (2.0 * a * a - b) * z * z * z; }

}  // namespace

void FatouConfig::validate(const MapSpec& map) const {
  if (series_order < 2 || series_order > 16) throw InvalidArgument("series order must be in [2, 16]");
  if (!(trap_radius > 0.0) || !(trap_radius < map.evaluation_radius())) {
    throw InvalidArgument("trap radius must be positive and below the evaluation radius");
  }
  if (!(trap_angle > 0.0) || !(trap_angle < std::numbers::pi)) throw InvalidArgument("trap angle must be in (0, pi)");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
  if (!(target_tol > 0.0)) throw InvalidArgument("target_tol must be positive");
  if (repelling_chart_radius < 0.0) throw InvalidArgument("repelling chart radius must be non-negative");
}

nlohmann::json to_json(const FatouConfig& cfg) {
  return {{"series_order", cfg.series_order},     {"trap_radius", cfg.trap_radius},
          {"trap_angle", cfg.trap_angle},         {"max_iterations", cfg.max_iterations},
          {"target_tol", cfg.target_tol},         {"repelling_chart_radius", cfg.repelling_chart_radius}};
}

FatouConfig config_from_json(const nlohmann::json& doc, FatouConfig base) {
  if (!doc.is_object()) throw InvalidArgument("Fatou config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "series_order") base.series_order = value.get<int>();
    else if (key == "trap_radius") base.trap_radius = value.get<double>();
    else if (key == "trap_angle") base.trap_angle = value.get<double>();
    else if (key == "max_iterations") base.max_iterations = value.get<long>();
    else if (key == "target_tol") base.target_tol = value.get<double>();
    else if (key == "repelling_chart_radius") base.repelling_chart_radius = value.get<double>();
    else throw InvalidArgument("unknown Fatou config key '" + key + "'");
  }
  return base;
}

cplx AbelSeries::operator()(cplx z) const {
  const double s = direction == Direction::attracting ? -1.0 : 1.0;
  const cplx inv = 1.0 / (a * z);
  cplx poly = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) poly = (poly + *it) * z;
  return -inv - gamma * std::log(s * inv) + poly;
}

cplx AbelSeries::derivative(cplx z) const {
  cplx poly = 0.0;
  for (int k = order(); k >= 1; --k) poly = poly * z + double(k) * coefficients[k - 1];
  return 1.0 / (a * z * z) + gamma / z + poly;
}

AbelSeries solve_abel_series(const MapSpec& map, const GermData& germ, int order, Direction direction) {
  if (!germ.simple()) throw NotParabolic("Abel series needs a simple parabolic point");
  if (order < 0 || order > 16) throw InvalidArgument("series order must be in [0, 16]");
  AbelSeries series{direction, germ.a, germ.gamma, Series(std::size_t(order), 0.0)};
  if (order == 0) return series;

  // The z^m coefficient of the residual is (m-1) a b_{m-1} plus terms in
  // b_1 .. b_{m-2}, so the b_k come out one order at a time.
  const AbelSystem sys = abel_system(map, germ.a, germ.gamma, order, order + 1);
  for (int m = 2; m <= order + 1; ++m) {
    cplx r = sys.base[m];
    for (int k = 1; k < m - 1; ++k) r += series.coefficients[k - 1] * sys.powers[k][m];
    const cplx pivot = sys.powers[m - 1][m];
    if (std::abs(pivot) == 0.0) throw NotParabolic("singular Abel system");
    series.coefficients[m - 2] = -r / pivot;
  }
  return series;
}

std::vector<cplx> abel_formal_residual(const MapSpec& map, const AbelSeries& series, int max_order) {
  const AbelSystem sys = abel_system(map, series.a, series.gamma, series.order(), max_order);
  Series out = sys.base;
  for (int k = 1; k <= series.order(); ++k) {
    for (std::size_t m = 0; m < out.size(); ++m) out[m] += series.coefficients[k - 1] * sys.powers[k][m];
  }
  return out;
}

cplx invert_series(const AbelSeries& series, cplx w, const FatouConfig& cfg) {
  if (w == 0.0) throw NewtonFailure("series chart does not contain w = 0");
  cplx z = -1.0 / (series.a * w);
  for (int step = 0; step < 64; ++step) {
    const cplx delta = (series(z) - w) / series.derivative(z);
    z -= delta;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NewtonFailure("series inversion diverged");
    if (std::abs(delta) <= 4.0 * kEps * std::abs(z)) break;
  }
  if (!(std::abs(series(z) - w) <= 1e-12 * std::max(1.0, std::abs(w)))) {
    throw NewtonFailure("series inversion did not converge");
  }
  const cplx oriented = series.direction == Direction::attracting ? -series.a * z : series.a * z;
  if (!(arg_abs(oriented) < cfg.trap_angle)) throw NewtonFailure("series inverse left the chart sector");
  return z;
}

std::string to_string(BasinStatus status) {
  switch (status) {
    case BasinStatus::converged:
      return "converged";
    case BasinStatus::escaped:
      return "escaped";
    case BasinStatus::unknown:
      return "unknown";
  }
  return "unknown";
}

bool in_attracting_trap(cplx leading, int p, cplx z, double radius, double angle) {
  return std::abs(z) < radius && arg_abs(-leading * std::pow(z, p)) < angle;
}

bool in_repelling_trap(cplx leading, int p, cplx z, double radius, double angle) {
  return std::abs(z) < radius && arg_abs(leading * std::pow(z, p)) < angle;
}

TrapOrbit orbit_to_trap(const MapSpec& map, cplx leading, int p, cplx z, const FatouConfig& cfg) {
  const double radius = map.evaluation_radius();
  for (long n = 0; n < cfg.max_iterations; ++n) {
    if (!(std::abs(z) <= radius)) return {{BasinStatus::escaped, n, n, false}, z};
    if (z == 0.0) return {{BasinStatus::converged, n, n, true}, z};
    if (in_attracting_trap(leading, p, z, cfg.trap_radius, cfg.trap_angle)) {
      return {{BasinStatus::converged, n, n, false}, z};
    }
    try {
      z = evaluate_jet(map, z).value;
    } catch (const Error&) {
      return {{BasinStatus::escaped, n + 1, n + 1, false}, z};
    }
  }
  return {{BasinStatus::unknown, cfg.max_iterations, cfg.max_iterations, false}, z};
}

FatouOutcome attracting_fatou_outcome(const MapSpec& map, const AbelSeries& series, cplx z, const FatouConfig& cfg) {
  const TrapOrbit orbit = orbit_to_trap(map, series.a, 1, z, cfg);
  FatouOutcome out{orbit.verdict, std::nullopt};
  if (orbit.verdict.status == BasinStatus::converged && !orbit.verdict.stationary) {
    out.value = series(orbit.point) - double(orbit.verdict.index);
  }
  return out;
}

cplx attracting_fatou(const MapSpec& map, const AbelSeries& series, cplx z, const FatouConfig& cfg) {
  const FatouOutcome out = attracting_fatou_outcome(map, series, z, cfg);
  if (out.value) return *out.value;
  if (out.verdict.stationary) throw FatouError("Fatou coordinate is undefined at the fixed point", out.verdict);
  if (out.verdict.status == BasinStatus::escaped) {
    throw FatouError("orbit left the evaluation disk before reaching the attracting trap", out.verdict);
  }
  throw FatouError("orbit did not reach the attracting trap within max_iterations", out.verdict);
}

cplx repelling_fatou(const MapSpec& map, const AbelSeries& series, cplx z, const FatouConfig& cfg) {
  const cplx a = series.a;
  const cplx b = a * a * (1.0 - series.gamma);
  const double radius = map.evaluation_radius();
  for (long n = 0; n < cfg.max_iterations; ++n) {
    if (!(std::abs(z) <= radius)) {
      throw FatouError("backward orbit left the evaluation disk", {BasinStatus::escaped, n, n, false});
    }
    if (z == 0.0) throw FatouError("Fatou coordinate is undefined at the fixed point", {BasinStatus::converged, n, n, true});
    if (in_repelling_trap(a, 1, z, cfg.trap_radius, cfg.trap_angle)) return series(z) + double(n);
    try {
      z = local_inverse(map, z, inverse_guess(a, b, z));
    } catch (const Error& e) {
      throw FatouError(std::string("inverse branch failed: ") + e.what(), {BasinStatus::unknown, n, n, false});
    }
  }
  throw FatouError("backward orbit did not reach the repelling trap within max_iterations",
                   {BasinStatus::unknown, cfg.max_iterations, cfg.max_iterations, false});
}

ChartPreimage repelling_chart_preimage(const AbelSeries& series, cplx w, const FatouConfig& cfg, long extra_shift) {
  double reach = cfg.chart_radius();
  for (int attempt = 0; attempt <= 3; ++attempt, reach *= 2.0) {
    const long shift = std::max(0L, long(std::ceil(w.real() + reach))) + extra_shift;
    try {
      return {invert_series(series, w - double(shift), cfg), shift};
    } catch (const NewtonFailure&) {
    }
  }
  throw NewtonFailure("repelling series inversion failed after doubling the chart radius three times");
}

cplx repelling_parametrization(const MapSpec& map, const AbelSeries& series, cplx w, const FatouConfig& cfg,
                               long extra_shift) {
  const ChartPreimage pre = repelling_chart_preimage(series, w, cfg, extra_shift);
  cplx z = pre.base;
  for (long i = 0; i < pre.shift; ++i) {
    if (!(std::abs(z) <= map.evaluation_radius())) {
      throw FatouError("w lies outside the domain of the extended repelling parametrization",
                       {BasinStatus::escaped, i, i, false});
    }
    z = evaluate_jet(map, z).value;
  }
  return z;
}

bool petal_membership(const GermData& germ, const PetalSpec& petal, cplx z) {
  if (z == 0.0) throw InvalidArgument("petal membership is undefined at the fixed point");
  if (!germ.simple()) throw NotParabolic("petal charts need a simple parabolic point");
  const cplx w = -1.0 / (germ.a * z);
  const cplx oriented = petal.direction == Direction::attracting ? w : -w;
  if (petal.kind == PetalSpec::Kind::very_large) {
    return w.imag() > petal.chart_radius || w.imag() < -petal.chart_radius || oriented.real() > petal.chart_radius;
  }
  return std::abs(w - petal.center) > petal.chart_radius && arg_abs(oriented) < petal.alpha;
}

long brimming_shift(const PetalSpec& petal, cplx w) {
  const double sign = petal.direction == Direction::attracting ? 1.0 : -1.0;
  constexpr long kLimit = 100000000;
  // Membership test directly on chart values.
  auto inside = [&](cplx v) {
    const cplx oriented = sign * v;
    if (petal.kind == PetalSpec::Kind::very_large) {
      return v.imag() > petal.chart_radius || v.imag() < -petal.chart_radius || oriented.real() > petal.chart_radius;
    }
    return std::abs(v - petal.center) > petal.chart_radius && arg_abs(oriented) < petal.alpha;
  };
  for (long n = 0; n < kLimit; ++n) {
    if (inside(w + sign * double(n))) return n;
  }
  throw InvalidArgument("no integer translate found in the petal image");
}

ParabolicGerm::ParabolicGerm(MapSpec map, FatouConfig cfg) : map_(std::move(map)), cfg_(cfg), data_(germ_data(map_)) {
  cfg_.validate(map_);
  if (!data_.simple()) throw NotParabolic("normalized Fatou coordinates need a simple parabolic point");
  attracting_ = solve_abel_series(map_, data_, cfg_.series_order, Direction::attracting);
  repelling_ = solve_abel_series(map_, data_, cfg_.series_order, Direction::repelling);
}

cplx ParabolicGerm::attracting_parametrization(cplx w) const {
  const double reach = cfg_.chart_radius();
  const long shift = std::max(0L, long(std::ceil(reach - w.real())));
  cplx z = invert_series(attracting_, w + double(shift), cfg_);
  for (long i = 0; i < shift; ++i) z = local_inverse(map_, z, inverse_guess(data_.a, data_.b, z));
  return z;
}

AbelCheck abel_residual_check(const ParabolicGerm& germ, Direction direction, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  const cplx a = germ.data().a;
  const FatouConfig& cfg = germ.config();
  AbelCheck out{0.0, samples, 0};
  for (int i = 0; i < samples; ++i) {
    const double modulus = 10.0 * std::pow(100.0, uniform());
    const double angle = (std::numbers::pi / 2.0) * (2.0 * uniform() - 1.0) * (1.0 - 1e-9);
    const cplx w = std::polar(modulus, angle);
    if (direction == Direction::attracting) {
      const cplx z = -1.0 / (a * w);
      if (in_attracting_trap(a, 1, z, cfg.trap_radius, cfg.trap_angle)) ++out.in_trap;
      out.sup = std::max(out.sup, std::abs(germ.attracting_fatou(evaluate(germ.map(), z)) - germ.attracting_fatou(z) - 1.0));
    } else {
      const cplx z = 1.0 / (a * w);
      if (in_repelling_trap(a, 1, z, cfg.trap_radius, cfg.trap_angle)) ++out.in_trap;
      out.sup = std::max(out.sup, std::abs(germ.repelling_fatou(evaluate(germ.map(), z)) - germ.repelling_fatou(z) - 1.0));
    }
  }
  return out;
}

cplx exploratory_fatou(const MapSpec& map, const GermData& germ, cplx z, const FatouConfig& cfg) {
  const int p = germ.degeneracy_p;
  const cplx c = germ.leading;
  // f(z) - z = c z^{p+1} (1 + d_1 z + ...); 1/(f(z) - z) = z^{-(p+1)} / c * sum e_j z^j
  const auto coeffs = detail::taylor_series(map, 2 * p + 2);
  Series d(std::size_t(p) + 1, 0.0);
  d[0] = 1.0;
  for (int i = 1; i <= p; ++i) d[i] = coeffs[p + i] / c;
  const Series e = reciprocal(d, std::size_t(p) + 1);
  const cplx log_coefficient = e[p] / c + double(p + 1) / 2.0;

  const TrapOrbit entry = orbit_to_trap(map, c, p, z, cfg);
  if (entry.verdict.status != BasinStatus::converged || entry.verdict.stationary) {
    throw FatouError("orbit does not reach an attracting trap", entry.verdict);
  }
  // Attracting direction the orbit settles along: -c u^p > 0.
  const double k = std::round((std::arg(entry.point) + std::arg(-c) / p) * p / (2.0 * std::numbers::pi));
  const cplx direction = std::polar(1.0, (2.0 * std::numbers::pi * k - std::arg(-c)) / p);

  auto approximant = [&](cplx u) {
    cplx acc = log_coefficient * std::log(u / direction);
    for (int j = 0; j < p; ++j) acc += e[j] / c * std::pow(u, j - p) / double(j - p);
    return acc;
  };

  const long base = std::max(64L, entry.verdict.index);
  cplx u = z;
  long n = 0;
  std::array<cplx, 2> estimates{};
  std::array<double, 2> scales{};
  int filled = 0;
  for (long target : {base, 2 * base, 4 * base}) {
    for (; n < target; ++n) u = evaluate_jet(map, u).value;
    const cplx value = approximant(u) - double(n);
    if (filled < 2) {
      estimates[filled] = value;
      scales[filled] = std::pow(double(n), -1.0 / p);
      ++filled;
    } else {
      estimates = {estimates[1], value};
      scales = {scales[1], std::pow(double(n), -1.0 / p)};
    }
  }
  // Linear extrapolation of the last two estimates to n^{-1/p} = 0.
  return (estimates[1] * scales[0] - estimates[0] * scales[1]) / (scales[0] - scales[1]);
}

}  // namespace hornlab
