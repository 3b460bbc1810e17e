#pragma once

// Numerical radius nu(T) = sup{|x*(T x)| : (x, x*) in Pi(X)} and its
// absolute and polynomial variants.
//
// Every backend returns a witness norming pair from which the value can be
// recomputed. The smooth backend searches the set of points where the norming
// functional is the canonical duality map; that set is dense in the sphere, so
// the supremum over it equals nu(T).

#include <cstdint>
#include <string>

#include "numidx/operator.hpp"
#include "numidx/polynomial.hpp"
#include "numidx/sphere_search.hpp"

namespace numidx {

enum class RadiusMethod { automatic, ascent, enumerate, grid };
enum class Guarantee { certified_lower_bound, exact_enumeration };

const char* to_string(RadiusMethod method);
const char* to_string(Guarantee guarantee);
/// Accepts auto|ascent|enumerate|grid; throws ParseError("method", ...) otherwise.
RadiusMethod parse_radius_method(const std::string& text);

struct RadiusEstimate {
  double value = 0.0;
  NormingPair witness;
  RadiusMethod method = RadiusMethod::ascent;
  Guarantee guarantee = Guarantee::certified_lower_bound;
  long work = 0;  // objective evaluations or grid samples
};

struct RadiusOptions {
  RadiusMethod method = RadiusMethod::automatic;
  AscentOptions ascent;
  int resolution = 2000;
};

/// Dispatch: l_1^m/l_inf^m (flat, or nested with one exponent) -> enumerate, everything else -> ascent; `grid`
/// on request for real dim <= 3 or complex dim <= 2.
///
/// Towers containing 1- or inf-sums below the root are searched by the same
/// ascent with the canonical selection of the duality map; the value is still
/// a certified lower bound.
RadiusEstimate numerical_radius(const Operator& t, const RadiusOptions& options, std::uint64_t seed);

/// Throws OutOfRange unless every p-sum exponent lies in (1, inf).
RadiusEstimate radius_ascent(const Operator& t, const AscentOptions& options, std::uint64_t seed);

/// Exact value on l_1^m and l_inf^m (flat, or nested with one exponent): the maximum over the extreme points
/// of the ball of the largest value attained on their face of norming
/// functionals. Throws DegenerateInput for other shapes.
RadiusEstimate radius_enumerate(const Operator& t);

/// Brute-force sweep over for_each_grid_point. On flat real l_1 / l_inf the
/// whole (finite) set of extreme norming functionals is tried at every sample;
/// elsewhere the canonical one is used.
RadiusEstimate radius_grid_oracle(const Operator& t, int resolution);

/// |x*(T x)| for the canonical norming functional of the unit vector x.
double radius_objective(const Operator& t, std::span<const Scalar> x);

/// Absolute numerical radius on flat l_p^m, 1 <= p < inf:
///   sup_{||x||_p = 1} sum_i |x_i|^(p-1) |(T x)_i|   (0^0 read as 1).
/// `method` may be automatic/ascent or grid. Throws DegenerateInput on other shapes.
RadiusEstimate absolute_radius(const Operator& t, const RadiusOptions& options, std::uint64_t seed);
double absolute_objective(const Operator& t, std::span<const Scalar> x);

/// nu(P) = sup |x*(P x)| over norming pairs; ascent or grid.
RadiusEstimate poly_radius(const HomogeneousPolynomial& p, const RadiusOptions& options, std::uint64_t seed);

/// sup ||P(x)|| over the unit sphere (degree 1: the operator norm), as a
/// certified lower bound with a unit witness.
OperatorNormEstimate poly_norm(const HomogeneousPolynomial& p, const RadiusOptions& options, std::uint64_t seed);

struct EnumerationPretest {
  bool passed = true;
  double max_gap = 0.0;
  std::string diagnostic;
};

/// Compares radius_enumerate with radius_grid_oracle on random real l_1^m and
/// l_inf^m operators, m in {2, 3}. The enumeration candidate set is only
/// trusted after this passes.
EnumerationPretest enumeration_pretest(int cases, int resolution, std::uint64_t seed, double tolerance = 1e-9);

}  // namespace numidx
