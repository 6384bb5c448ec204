#include "hornlab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hornlab/error.hpp"

namespace hornlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Jet polynomial_jet(const shape::Polynomial& p, cplx z) {
  // f = z q(z), q(z) = c_1 + c_2 z + ...
  cplx q = 0.0;
  cplx dq = 0.0;
  for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) {
    dq = dq * z + q;
    q = q * z + *it;
  }
  return {z * q, q + z * dq};
}

Jet blaschke_jet(int degree, cplx z) {
  const double a = double(degree - 1) / double(degree + 1);
  const cplx u = z + 1.0;
  const cplx den = 1.0 + a * u;
  if (std::abs(den) < 1e-300) throw SingularPoint("Blaschke factor has a pole at this point");
  const cplx m = (u + a) / den;
  const cplx dm = (1.0 - a * a) / (den * den);
  const cplx m_pow = std::pow(m, degree - 1);
  return {m_pow * m - 1.0, double(degree) * m_pow * dm};
}

Jet blaschke_infinite_jet(cplx z) {
  const cplx u = z + 1.0;
  const cplx den = u + 1.0;
  if (std::abs(den) < 1e-300) throw SingularPoint("essential singularity of B_inf");
  const cplx e = std::exp(2.0 * (u - 1.0) / den);
  return {e - 1.0, e * 4.0 / (den * den)};
}

Jet moebius_jet(const shape::Moebius& m, cplx z) {
  const cplx den = m.c * z + m.d;
  if (std::abs(den) < 1e-300) throw SingularPoint("Moebius pole");
  return {(m.a * z + m.b) / den, (m.a * m.d - m.b * m.c) / (den * den)};
}

Jet jet(const MapSpec& map, cplx z);

Jet conjugated_jet(const shape::Conjugated& c, cplx z) {
  const cplx u = invert_change(*c.change, z);
  const Jet inner = jet(*c.inner, u);
  const Jet outer = jet(*c.change, inner.value);
  const Jet change_at_u = jet(*c.change, u);
  if (std::abs(change_at_u.derivative) == 0.0) throw SingularPoint("change of variable is critical");
  return {outer.value, outer.derivative * inner.derivative / change_at_u.derivative};
}

Jet jet(const MapSpec& map, cplx z) {
  return std::visit(
      overloaded{
          [&](const shape::Polynomial& p) { return polynomial_jet(p, z); },
          [&](const shape::BlaschkeFinite& b) { return blaschke_jet(b.degree, z); },
          [&](const shape::BlaschkeInfinite&) { return blaschke_infinite_jet(z); },
          [&](const shape::Moebius& m) { return moebius_jet(m, z); },
          [&](const shape::Conjugated& c) { return conjugated_jet(c, z); },
          [&](const shape::Composed& c) {
            Jet acc{z, 1.0};
            for (const auto& part : c.parts) {
              const Jet step = jet(*part, acc.value);
              acc = {step.value, step.derivative * acc.derivative};
            }
            return acc;
          },
          [&](const shape::Iterated& it) {
            Jet acc{z, 1.0};
            for (int i = 0; i < it.times; ++i) {
              const Jet step = jet(*it.inner, acc.value);
              acc = {step.value, step.derivative * acc.derivative};
            }
            return acc;
          },
      },
      map.node());
}

void require_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("evaluation radius must be positive");
}

}  // namespace

MapSpec::MapSpec(Node node, double evaluation_radius) : node_(std::move(node)), radius_(evaluation_radius) {
  require_radius(radius_);
}

MapSpec MapSpec::polynomial(std::vector<cplx> coefficients, double evaluation_radius) {
  if (coefficients.empty()) throw InvalidArgument("polynomial needs at least the linear coefficient");
  return MapSpec(shape::Polynomial{std::move(coefficients)}, evaluation_radius);
}

MapSpec MapSpec::blaschke(int degree, double evaluation_radius) {
  if (degree < 2) throw InvalidArgument("Blaschke degree must be at least 2");
  return MapSpec(shape::BlaschkeFinite{degree}, evaluation_radius);
}

MapSpec MapSpec::blaschke_infinite(double evaluation_radius) {
  return MapSpec(shape::BlaschkeInfinite{}, evaluation_radius);
}

MapSpec MapSpec::moebius(cplx a, cplx b, cplx c, cplx d, double evaluation_radius) {
  if (std::abs(a * d - b * c) == 0.0) throw InvalidArgument("Moebius map with ad - bc = 0");
  return MapSpec(shape::Moebius{a, b, c, d}, evaluation_radius);
}

MapSpec MapSpec::linear(cplx lambda, double evaluation_radius) {
  return moebius(lambda, 0.0, 0.0, 1.0, evaluation_radius);
}

MapSpec MapSpec::conjugated(const MapSpec& inner, const MapSpec& change, double evaluation_radius) {
  return MapSpec(shape::Conjugated{std::make_shared<const MapSpec>(inner), std::make_shared<const MapSpec>(change)},
                 evaluation_radius);
}

MapSpec MapSpec::composed(const std::vector<MapSpec>& parts, double evaluation_radius) {
  if (parts.empty()) throw InvalidArgument("composition of zero maps");
  shape::Composed c;
  for (const auto& p : parts) c.parts.push_back(std::make_shared<const MapSpec>(p));
  return MapSpec(std::move(c), evaluation_radius);
}

MapSpec MapSpec::iterated(const MapSpec& inner, int times, double evaluation_radius) {
  if (times < 1) throw InvalidArgument("iteration count must be at least 1");
  return MapSpec(shape::Iterated{std::make_shared<const MapSpec>(inner), times}, evaluation_radius);
}

Jet evaluate_jet(const MapSpec& map, cplx z) {
  const Jet j = jet(map, z);
  if (!finite(j.value) || !finite(j.derivative)) throw SingularPoint("non-finite map value");
  return j;
}

cplx evaluate(const MapSpec& map, cplx z) {
  if (!(std::abs(z) <= map.evaluation_radius())) throw OutsideDisk("point outside the evaluation disk");
  return evaluate_jet(map, z).value;
}

cplx invert_change(const MapSpec& change, cplx w) {
  if (const auto* m = std::get_if<shape::Moebius>(&change.node())) {
    const cplx den = -m->c * w + m->a;
    if (std::abs(den) < 1e-300) throw SingularPoint("change of variable not invertible here");
    return (m->d * w - m->b) / den;
  }
  if (const auto* p = std::get_if<shape::Polynomial>(&change.node())) {
    if (p->coefficients[0] == 0.0) throw SingularPoint("change of variable is critical at 0");
    if (p->coefficients.size() == 1) return w / p->coefficients[0];
    try {
      return local_inverse(change, w, w / p->coefficients[0]);
    } catch (const NewtonFailure& e) {
      throw SingularPoint(std::string("change of variable not invertible: ") + e.what());
    }
  }
  const cplx slope = evaluate_jet(change, 0.0).derivative;
  if (std::abs(slope) == 0.0) throw SingularPoint("change of variable is critical at 0");
  try {
    return local_inverse(change, w, w / slope);
  } catch (const NewtonFailure& e) {
    throw SingularPoint(std::string("change of variable not invertible: ") + e.what());
  }
}

std::vector<cplx> taylor_coefficients(const MapSpec& map, int order) {
  if (order < 1 || order > 16) throw InvalidArgument("Taylor order must be in [1, 16]");
  return detail::taylor_series(map, order);
}

std::vector<cplx> detail::taylor_series(const MapSpec& map, int order) {
  if (order < 1) throw InvalidArgument("Taylor order must be positive");
  std::vector<cplx> out(order, 0.0);
  if (const auto* p = std::get_if<shape::Polynomial>(&map.node())) {
    for (int k = 0; k < order && k < int(p->coefficients.size()); ++k) out[k] = p->coefficients[k];
    return out;
  }
  const double r = map.evaluation_radius() / 4.0;
  const int n = std::max(128, 4 * order);
  std::vector<cplx> samples(n);
  for (int j = 0; j < n; ++j) {
    samples[j] = evaluate(map, std::polar(r, 2.0 * std::numbers::pi * j / n));
  }
  for (int k = 1; k <= order; ++k) {
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += samples[j] * std::polar(1.0, -2.0 * std::numbers::pi * double((j * k) % n) / n);
    }
    out[k - 1] = acc / (double(n) * std::pow(r, k));
  }
  return out;
}

GermData germ_data(const MapSpec& map) {
  constexpr int kOrder = 16;
  constexpr double kZero = 1e-10;
  const auto c = taylor_coefficients(map, kOrder);
  if (std::abs(c[0] - 1.0) > 1e-12) throw NotParabolic("derivative at 0 is not 1");
  GermData g;
  g.a = c[1];
  g.b = c[2];
  int first = -1;
  for (int k = 1; k < kOrder; ++k) {
    if (std::abs(c[k]) > kZero) {
      first = k;
      break;
    }
  }
  if (first < 0) throw NotParabolic("all Taylor coefficients vanish to the tested order");
  g.degeneracy_p = first;  // c_{p+1} stored at index p
  g.leading = c[first];
  if (g.degeneracy_p == 1) {
    g.gamma = 1.0 - g.b / (g.a * g.a);
  } else {
    g.gamma = cplx(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
  }
  return g;
}

ResidueEstimate iterative_residue_contour(const MapSpec& map, double radius, int samples) {
  if (samples < 64) throw InvalidArgument("contour needs at least 64 samples");
  if (!(radius > 0.0)) throw InvalidArgument("contour radius must be positive");
  samples += samples % 2;
  cplx full = 0.0;
  cplx half = 0.0;
  for (int j = 0; j < samples; ++j) {
    const cplx z = std::polar(radius, 2.0 * std::numbers::pi * j / samples);
    const cplx d = evaluate(map, z) - z;
    if (std::abs(d) < 1e-14) throw SingularPoint("f(z) - z vanishes at a contour node");
    const cplx term = (1.0 / d + 1.0 / z) * z;
    full += term;
    if (j % 2 == 0) half += term;
  }
  full /= double(samples);
  half /= double(samples / 2);
  return {full, std::abs(full - half)};
}

cplx local_inverse(const MapSpec& map, cplx w, cplx guess, const NewtonOptions& options) {
  cplx z = guess;
  double previous = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int step = 0; step < options.max_steps; ++step) {
    const Jet j = evaluate_jet(map, z);
    if (std::abs(j.derivative) < 1e-300) throw NewtonFailure("derivative vanishes at a Newton iterate");
    const cplx delta = (j.value - w) / j.derivative;
    z -= delta;
    const double size = std::abs(delta);
    const double floor = 4.0 * kEps * std::max(std::abs(z), 1e-300);
    if (size <= floor) break;
    if (size > previous && size > 1e3 * floor) {
      if (++growth >= 2) throw NewtonFailure("Newton steps grew twice in a row");
    } else {
      growth = 0;
    }
    previous = size;
  }
  if (!(std::abs(evaluate_jet(map, z).value - w) < options.tolerance)) {
    throw NewtonFailure("Newton did not reach the residual tolerance");
  }
  return z;
}

NormalizedGerm normalize_germ(const MapSpec& map) {
  const GermData g = germ_data(map);
  if (!g.simple()) throw NotParabolic("normalization needs a simple parabolic point");
  if (std::abs(g.a) == 0.0) throw NotParabolic("quadratic coefficient vanishes");
  const cplx lambda = g.a / std::abs(g.a);
  if (lambda == 1.0) return {map, 1.0};
  return {MapSpec::conjugated(map, MapSpec::linear(lambda, map.evaluation_radius()), map.evaluation_radius()), lambda};
}

}  // namespace hornlab
