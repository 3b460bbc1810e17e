#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "numidx/space.hpp"

namespace numidx {

struct AscentOptions {
  int restarts = 64;
  double backtrack = 0.5;
  /// Converged once the value gains less than this over `stall_iterations` steps.
  double tolerance = 1e-10;
  int stall_iterations = 5;
  int max_iterations = 500;
  /// Coordinates below this fraction of the largest modulus are candidates for
  /// being pinned to zero after a local run.
  double snap_threshold = 1e-2;
};

/// Objective on the unit sphere; receives a point of norm 1.
using SphereObjective = std::function<double(std::span<const Scalar>)>;

struct SphereMaximum {
  std::vector<Scalar> x;  // unit vector attaining `value`
  double value = 0.0;
  long evaluations = 0;
};

/// Multi-start local maximisation of `objective` over the unit sphere.
///
/// Candidates are the coordinate axes plus `restarts` random points; each
/// random start runs a finite-difference gradient ascent in the unnormalised
/// coordinates (x = y / ||y||) with backtracking, followed by a pass that pins
/// near-zero coordinates to zero and re-runs the ascent on the remaining
/// support. The best value wins, ties going to the earliest candidate, so
/// raising `restarts` with the same seed never lowers the result.
SphereMaximum maximize_on_sphere(const SpaceDescriptor& space, const SphereObjective& objective,
                                 const AscentOptions& options, std::uint64_t seed);

/// Points of a deterministic angular grid over the unit sphere, modulo the
/// symmetry x -> -x (real) or x -> e^{it} x (complex; first coordinate is
/// kept real and nonnegative). `resolution` counts samples per half turn.
/// Real flat l_inf spaces are swept face by face on the cube surface instead.
/// Supported for real dimension <= 3 and complex dimension <= 2; throws
/// BudgetExceeded otherwise. Coordinates that vanish analytically are exactly 0.
void for_each_grid_point(const SpaceDescriptor& space, int resolution,
                         const std::function<void(std::span<const Scalar>)>& visit);

/// Throws BudgetExceeded when `space` is too large for for_each_grid_point.
void check_grid_dimension(const SpaceDescriptor& space);

}  // namespace numidx
