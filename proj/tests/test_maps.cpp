#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hornlab/catalog.hpp"
#include "hornlab/error.hpp"
#include "hornlab/maps.hpp"

using namespace hornlab;

namespace {

const Catalog& catalog() {
  static const Catalog c = Catalog::builtin();
  return c;
}

using Series = std::vector<cplx>;

Series mul(const Series& x, const Series& y) {
  Series out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; i + j < x.size(); ++j) out[i + j] += x[i] * y[j];
  return out;
}

}  // namespace

TEST_CASE("evaluate: closed forms") {
  const auto f = MapSpec::polynomial({1.0, 1.0}, 4.0);
  CHECK(std::abs(evaluate(f, 0.1) - 0.11) < 1e-15);
  CHECK(evaluate(f, 0.0) == 0.0);
  CHECK_THROWS_AS(evaluate(f, 5.0), OutsideDisk);

  const auto b2 = MapSpec::blaschke(2, 3.0);
  CHECK(std::abs(evaluate(b2, 0.0)) < 1e-15);
  CHECK(std::abs(evaluate_jet(b2, 0.0).derivative - 1.0) < 1e-14);
}

TEST_CASE("evaluate: composition, conjugation and iteration follow the declared order") {
  const auto a = MapSpec::polynomial({2.0, 1.0}, 16.0);  // 2z + z^2
  const auto b = MapSpec::polynomial({0.5}, 16.0);       // z/2
  const auto ba = MapSpec::composed({a, b}, 8.0);        // b(a(z))
  const cplx z(0.3, -0.2);
  CHECK(std::abs(evaluate(ba, z) - (z + z * z / 2.0)) < 1e-15);

  const auto f = MapSpec::polynomial({1.0, 1.0}, 4.0);
  const auto conj = MapSpec::conjugated(f, MapSpec::linear(2.0, 8.0), 8.0);
  CHECK(std::abs(evaluate(conj, z) - 2.0 * evaluate(f, z / 2.0)) < 1e-15);

  const auto f3 = MapSpec::iterated(f, 3, 4.0);
  CHECK(std::abs(evaluate(f3, z) - evaluate(f, evaluate(f, evaluate(f, z)))) < 1e-15);

  // Chain rule against a central difference.
  const double h = 1e-6;
  const cplx numeric = (evaluate(conj, z + h) - evaluate(conj, z - h)) / (2.0 * h);
  CHECK(std::abs(evaluate_jet(conj, z).derivative - numeric) < 1e-8);
}

TEST_CASE("taylor_coefficients: polynomials are exact") {
  const auto c = taylor_coefficients(MapSpec::polynomial({1.0, 1.0}, 4.0), 4);
  CHECK(c == std::vector<cplx>{1.0, 1.0, 0.0, 0.0});
  const auto d = taylor_coefficients(MapSpec::polynomial({1.0, 1.0, 3.0}, 4.0), 3);
  CHECK(d == std::vector<cplx>{1.0, 1.0, 3.0});
  CHECK_THROWS_AS(taylor_coefficients(MapSpec::polynomial({1.0, 1.0}, 4.0), 17), InvalidArgument);
}

TEST_CASE("taylor_coefficients: Blaschke entries against series arithmetic") {
  // ((u + 1/3)/(1 + u/3))^2 at u = 1 + z, minus 1. The ratio is
  // (1 + 3z/4) / (1 + z/4) = sum r_k z^k.
  const int n = 8;
  Series geometric(n), numerator(n, 0.0);
  for (int k = 0; k < n; ++k) geometric[k] = std::pow(-0.25, k);
  numerator[0] = 1.0;
  numerator[1] = 0.75;
  const Series ratio = mul(numerator, geometric);
  Series b2 = mul(ratio, ratio);
  b2[0] -= 1.0;
  const auto c = taylor_coefficients(catalog().map("blaschke-2"), n - 1);
  for (int k = 1; k < n; ++k) CHECK(std::abs(c[k - 1] - b2[k]) < 1e-12);
  CHECK(std::abs(c[1]) < 1e-12);
  CHECK(std::abs(c[2] + 1.0 / 16.0) < 1e-12);

  // exp(2 (u - 1)/(u + 1)) - 1 = exp(x) - 1 with x = z/(1 + z/2).
  Series x(n, 0.0);
  for (int k = 1; k < n; ++k) x[k] = std::pow(-0.5, k - 1);
  Series term(n, 0.0), expm1(n, 0.0);
  term[0] = 1.0;
  for (int k = 1; k < n; ++k) {
    term = mul(term, x);
    for (int j = 0; j < n; ++j) term[j] /= double(k);
    for (int j = 0; j < n; ++j) expm1[j] += term[j];
  }
  const auto e = taylor_coefficients(catalog().map("blaschke-inf"), n - 1);
  for (int k = 1; k < n; ++k) CHECK(std::abs(e[k - 1] - expm1[k]) < 1e-12);
}

TEST_CASE("germ_data: formula values") {
  const auto g1 = germ_data(MapSpec::polynomial({1.0, 1.0}, 4.0));
  CHECK(g1.a == 1.0);
  CHECK(g1.b == 0.0);
  CHECK(g1.gamma == 1.0);
  CHECK(g1.simple());

  const auto g2 = germ_data(MapSpec::polynomial({1.0, 1.0, 1.0}, 4.0));
  CHECK(g2.gamma == 0.0);

  const auto g3 = germ_data(MapSpec::polynomial({1.0, 0.5}, 8.0));
  CHECK(g3.a == 0.5);
  CHECK(g3.gamma == 1.0);

  const auto b2 = germ_data(catalog().map("blaschke-2"));
  CHECK(b2.degeneracy_p == 2);
  CHECK(std::isnan(b2.gamma.real()));

  CHECK_THROWS_AS(germ_data(MapSpec::polynomial({2.0, 1.0}, 4.0)), NotParabolic);
  CHECK_THROWS_AS(germ_data(MapSpec::polynomial({1.0}, 4.0)), NotParabolic);
}

TEST_CASE("every catalog germ fixes 0 with derivative 1") {
  for (const auto& e : catalog().entries()) {
    CAPTURE(e.id);
    CHECK(std::abs(evaluate(e.map, 0.0)) < 1e-12);
    CHECK(std::abs(taylor_coefficients(e.map, 1)[0] - 1.0) < 1e-12);
  }
}

TEST_CASE("iterative_residue_contour: matches the formula at every radius") {
  const auto exact = iterative_residue_contour(MapSpec::polynomial({1.0, 1.0}, 4.0), 0.1);
  CHECK(std::abs(exact.value - 1.0) < 1e-13);

  const auto zero = iterative_residue_contour(MapSpec::polynomial({1.0, 1.0, 1.0}, 4.0), 0.05);
  CHECK(std::abs(zero.value) < 1e-10);

  const auto quarter = iterative_residue_contour(MapSpec::polynomial({1.0, 0.25}, 16.0), 0.1);
  CHECK(std::abs(quarter.value - 1.0) < 1e-10);

  for (const auto& id : catalog().simple_parabolic_ids()) {
    const auto& map = catalog().map(id);
    const cplx gamma = germ_data(map).gamma;
    for (double r : {0.02, 0.05, 0.1}) {
      CAPTURE(id);
      CAPTURE(r);
      const auto est = iterative_residue_contour(map, r);
      CHECK(std::abs(est.value - gamma) < 1e-9);
      CHECK(est.tolerance < 1e-9);
    }
  }
  CHECK_THROWS_AS(iterative_residue_contour(MapSpec::polynomial({1.0, 1.0}, 4.0), 0.1, 32), InvalidArgument);
}

TEST_CASE("local_inverse: examples and right-inverse property") {
  const auto f = MapSpec::polynomial({1.0, 1.0}, 4.0);
  CHECK(local_inverse(f, 0.0, 0.0) == 0.0);
  CHECK(std::abs(local_inverse(f, 0.11, 0.1) - 0.1) < 1e-12);
  const cplx w(-0.09, 0.001);
  const cplx z = local_inverse(f, w, -0.1);
  CHECK(std::abs(evaluate(f, z) - w) < 1e-13);
  CHECK(std::abs(z + 0.1) < 0.02);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> radius(0.005, 0.05), angle(-1.0, 1.0);
  const NewtonOptions options;
  for (int i = 0; i < 100; ++i) {
    const cplx target = std::polar(radius(rng), angle(rng));  // repelling sector of z + z^2
    const cplx guess = target - target * target;
    CHECK(std::abs(evaluate(f, local_inverse(f, target, guess)) - target) < 10.0 * options.tolerance);
  }
}

TEST_CASE("local_inverse: reports failure at a critical point") {
  const auto f = MapSpec::polynomial({1.0, 1.0}, 4.0);
  CHECK_THROWS_AS(local_inverse(f, 0.3, -0.5), NewtonFailure);
}

TEST_CASE("normalize_germ: real positive quadratic coefficient") {
  const auto n1 = normalize_germ(MapSpec::polynomial({1.0, 1.0}, 4.0));
  CHECK(n1.lambda == 1.0);

  for (cplx a : {cplx(0.0, 1.0), cplx(-1.0, 0.0), cplx(0.3, -0.7)}) {
    CAPTURE(a);
    const auto n = normalize_germ(MapSpec::polynomial({1.0, a}, 4.0));
    const auto g = germ_data(n.map);
    CHECK(std::abs(g.a.imag()) < 1e-12);
    CHECK(g.a.real() > 0.0);
    CHECK(std::abs(g.a - std::abs(a)) < 1e-12);
    CHECK(std::abs(n.lambda - a / std::abs(a)) < 1e-15);
  }
  CHECK_THROWS_AS(normalize_germ(catalog().map("blaschke-2")), NotParabolic);
}

TEST_CASE("catalog: JSON round trip, references and errors") {
  for (const auto& e : catalog().entries()) {
    const auto back = map_from_json(map_to_json(e.map), nullptr);
    CAPTURE(e.id);
    CHECK(std::abs(evaluate(back, cplx(0.01, 0.02)) - evaluate(e.map, cplx(0.01, 0.02))) == 0.0);
  }
  CHECK_THROWS_AS(catalog().map("no-such-map"), InvalidArgument);
  CHECK_THROWS_AS(catalog().pair("no-such-pair"), InvalidArgument);
  CHECK_THROWS_AS(Catalog::from_json(json::parse(R"({"maps":[{"id":"x","variant":"spiral","evaluation_radius":1}]})")),
                  InvalidArgument);
  CHECK_THROWS_AS(map_from_json(json::parse(R"({"ref":"cauliflower"})"), nullptr), InvalidArgument);

  const auto simple = catalog().simple_parabolic_ids();
  CHECK(std::find(simple.begin(), simple.end(), "cauliflower") != simple.end());
  CHECK(std::find(simple.begin(), simple.end(), "blaschke-2") == simple.end());
}
