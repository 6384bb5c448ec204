#pragma once

#include <complex>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace hornlab {

using cplx = std::complex<double>;

class MapSpec;
using MapPtr = std::shared_ptr<const MapSpec>;

// Closed-form germs. Every variant is expressed in coordinates where the
// marked fixed point sits at 0.
namespace shape {

// f(z) = c_1 z + c_2 z^2 + ... ; no constant term.
struct Polynomial {
  std::vector<cplx> coefficients;
};

// B_d(u) = ((u + a)/(1 + a u))^d with a = (d-1)/(d+1), evaluated at u = z + 1
// and shifted back so the boundary parabolic point 1 sits at 0.
struct BlaschkeFinite {
  int degree = 2;
};

// B_inf(u) = exp(2 (u - 1)/(u + 1)), shifted the same way.
struct BlaschkeInfinite {};

struct Moebius {
  cplx a, b, c, d;
};

// change o inner o change^{-1}
struct Conjugated {
  MapPtr inner;
  MapPtr change;
};

// parts[0] is applied first.
struct Composed {
  std::vector<MapPtr> parts;
};

struct Iterated {
  MapPtr inner;
  int times = 1;
};

}  // namespace shape

// Immutable description of a holomorphic germ plus the radius of the disk about
// 0 on which evaluation is trusted.
class MapSpec {
 public:
  using Node = std::variant<shape::Polynomial, shape::BlaschkeFinite, shape::BlaschkeInfinite,
                            shape::Moebius, shape::Conjugated, shape::Composed, shape::Iterated>;

  MapSpec(Node node, double evaluation_radius);

  static MapSpec polynomial(std::vector<cplx> coefficients, double evaluation_radius);
  static MapSpec blaschke(int degree, double evaluation_radius);
  static MapSpec blaschke_infinite(double evaluation_radius);
  static MapSpec moebius(cplx a, cplx b, cplx c, cplx d, double evaluation_radius);
  static MapSpec linear(cplx lambda, double evaluation_radius);
  static MapSpec conjugated(const MapSpec& inner, const MapSpec& change, double evaluation_radius);
  static MapSpec composed(const std::vector<MapSpec>& parts, double evaluation_radius);
  static MapSpec iterated(const MapSpec& inner, int times, double evaluation_radius);

  const Node& node() const { return node_; }
  double evaluation_radius() const { return radius_; }

 private:
  Node node_;
  double radius_;
};

struct Jet {
  cplx value;
  cplx derivative;
};

// f(z); throws OutsideDisk when |z| exceeds the evaluation radius.
cplx evaluate(const MapSpec& map, cplx z);

// f(z) and f'(z) without the disk check. Still throws SingularPoint on poles
// and non-finite values.
Jet evaluate_jet(const MapSpec& map, cplx z);

// Inverse of a change of variable: closed form for Moebius and linear
// polynomials, Newton otherwise.
cplx invert_change(const MapSpec& change, cplx w);

// c_1 .. c_order of f at 0. Exact for Polynomial, discrete Cauchy integral on
// |z| = evaluation_radius / 4 otherwise.
std::vector<cplx> taylor_coefficients(const MapSpec& map, int order);

namespace detail {
// Same extraction without the order cap; the Abel solver needs a few orders
// past its series length.
std::vector<cplx> taylor_series(const MapSpec& map, int order);
}  // namespace detail

struct GermData {
  cplx a;      // z^2 coefficient
  cplx b;      // z^3 coefficient
  cplx gamma;  // 1 - b/a^2; NaN when degeneracy_p > 1
  int degeneracy_p = 1;
  cplx leading;  // c_{p+1}, the first nonvanishing coefficient past z
  bool simple() const { return degeneracy_p == 1; }
};

GermData germ_data(const MapSpec& map);

struct ResidueEstimate {
  cplx value;
  // |estimate(N) - estimate(N/2)|, a conservative bound on the quadrature error.
  double tolerance;
};

// (1/2 pi i) \oint [1/(f(z) - z) + 1/z] dz by the trapezoid rule.
ResidueEstimate iterative_residue_contour(const MapSpec& map, double radius, int samples = 256);

struct NewtonOptions {
  double tolerance = 1e-13;
  int max_steps = 64;
};

// Solves f(z) = w by Newton's method starting at guess; the result lies on the
// branch continuously connected to the guess.
cplx local_inverse(const MapSpec& map, cplx w, cplx guess, const NewtonOptions& options = {});

struct NormalizedGerm {
  MapSpec map;
  // Conjugating change is z -> lambda z, lambda = a/|a|, so the new quadratic
  // coefficient is a/lambda = |a|.
  cplx lambda;
};

NormalizedGerm normalize_germ(const MapSpec& map);

}  // namespace hornlab
