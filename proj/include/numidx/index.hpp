#pragma once

// Numerical index estimates n(X) = inf{nu(T) : ||T|| = 1} and variants.
//
// The infimum is approached by a min-max search over operators: every value
// reported is the ratio nu^(T)/||T||^ of a stored witness, hence an upper
// bound (best found), never the true index. Theoretical intervals from the
// literature are attached for comparison.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "numidx/radius.hpp"

namespace numidx {

struct MpResult {
  double p = 0.0;
  double value = 0.0;
  double argmax_t = 0.0;
};

/// M_p = sup_{t in [0,1]} |t^(p-1) - t| / (1 + t^p): dense scan on 10^5 + 1
/// points then golden-section refinement to 1e-12. Throws OutOfRange for
/// p < 1 or p = inf.
MpResult mp_constant(double p);

/// Closed form 1 / (p^(1/p) q^(1/q)) of the absolute index of L_p.
double absolute_index_target(double p);

struct TheoreticalBounds {
  double lower = 0.0;
  double upper = 1.0;
  std::string lower_source;
  std::string upper_source;
  std::string note;
};

/// Tightest known interval for n(X) on the given space (the field is taken
/// from the descriptor).
TheoreticalBounds theoretical_bounds(const SpaceDescriptor& space);

enum class IndexKind { numerical, rank, absolute, polynomial };
const char* to_string(IndexKind kind);

using IndexWitness = std::variant<Operator, HomogeneousPolynomial>;

struct IndexEstimate {
  double upper_bound = 1.0;
  IndexWitness witness = Operator::zero(SpaceDescriptor::scalar());
  RadiusEstimate witness_radius;
  OperatorNormEstimate witness_norm;
  long evaluations = 0;  // candidate operators evaluated (the budget spent)
  RadiusMethod radius_method = RadiusMethod::automatic;
  TheoreticalBounds bounds;
  Field field = Field::real;
  IndexKind kind = IndexKind::numerical;
  std::size_t rank = 0;                // rank cap for IndexKind::rank
  int degree = 1;                      // polynomial degree
  std::optional<double> target;        // closed-form value when one is known
};

struct IndexOptions {
  /// Number of candidate evaluations. The candidate stream does not depend on
  /// the budget, so a larger budget extends a smaller one and can only lower
  /// the estimate.
  int budget = 100;
  /// Inner radius search for screening candidates.
  RadiusOptions radius = [] {
    RadiusOptions o;
    o.ascent.restarts = 8;
    return o;
  }();
  NormOptions norm = [] {
    NormOptions o;
    o.restarts = 4;
    return o;
  }();
  /// An improving candidate is re-checked with `verify_factor` times the
  /// restarts (and an independent seed) before it is accepted.
  int verify_factor = 4;
  /// Extra first candidate; must act on the same space (its rank is not
  /// checked against the cap beyond matrix_rank).
  std::optional<Matrix> warm_start;
};

IndexEstimate numerical_index_estimate(const SpaceDescriptor& space, const IndexOptions& options, std::uint64_t seed);

/// Restricted to operators of rank <= r. r = dim runs the unrestricted search.
IndexEstimate rank_r_index_estimate(const SpaceDescriptor& space, std::size_t r, const IndexOptions& options,
                                    std::uint64_t seed);

/// |n|(X) via the absolute numerical radius; flat l_p^m, 1 < p < inf, m >= 2.
IndexEstimate absolute_index_estimate(const SpaceDescriptor& space, const IndexOptions& options, std::uint64_t seed);

/// Polynomial index of order k. k = 1 is the numerical index.
IndexEstimate poly_index_estimate(const SpaceDescriptor& space, int degree, const IndexOptions& options,
                                  std::uint64_t seed);

/// Independent re-evaluation of an estimate's ratio from its witness alone.
double recompute_ratio(const IndexEstimate& estimate, std::uint64_t seed);

}  // namespace numidx
