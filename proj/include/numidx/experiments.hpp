#pragma once

// Verification suites for the structural results: projection invariance along
// towers and block sums, sum-index formulas, monotone sweeps, duality and the
// M_p bounds. Each suite returns a SuiteReport whose records are assembled in
// case order, so a report is a pure function of (inputs, seed).

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "numidx/index.hpp"

namespace numidx {

struct NamedValue {
  std::string name;
  double value = 0.0;
  std::string method;     // backend that produced the value
  std::string guarantee;  // certified-lower-bound, exact-enumeration, upper-bound, closed-form
};

struct CaseRecord {
  std::string check;
  std::string inputs_hash;  // FNV-1a of the case inputs, hex
  std::vector<NamedValue> values;
  double violation = 0.0;
  bool pass = true;
};

/// One tolerance-bearing check inside a suite. `pass` iff max_violation <= tolerance.
/// Soft checks are reported but do not decide the suite verdict.
struct CheckSummary {
  std::string name;
  double tolerance = 0.0;
  double max_violation = 0.0;
  bool pass = true;
  bool hard = true;
};

struct SuiteReport {
  std::string suite;
  std::string label;  // distinguishes several reports of one suite
  std::vector<std::string> descriptors;
  int cases = 0;
  std::uint64_t seed = 0;
  std::vector<CheckSummary> checks;
  std::vector<CaseRecord> records;
  std::vector<std::string> notes;

  double max_violation() const;
  /// All hard checks pass.
  bool pass() const;
  /// Adds a record and folds its violation into the named check.
  void add(CaseRecord record);
  CheckSummary& check(const std::string& name);
  const CheckSummary& check(const std::string& name) const;
};

struct ExperimentOptions {
  RadiusOptions radius;
  IndexOptions index;
  /// Worker threads for independent cases; results never depend on it.
  int threads = 1;
  /// Largest total dimension admitted by the index suites.
  std::size_t dim_cap = 6;
};

/// X_1 = scalar, X_{k+1} = psum(p_k, [X_k, scalar]); exponents.size() + 1 levels.
SpaceDescriptor make_tower(const std::vector<Exponent>& exponents, Field field = Field::real);
/// The levels X_1, X_2, ... of a tower (following child 0 down to a leaf).
std::vector<SpaceDescriptor> tower_levels(const SpaceDescriptor& tower);
/// L∘Q_{m,j} on X_{m+j} for L on X_m, built as the padded chain of the
/// block projections P_m, ..., P_{m+j-1}.
Operator lift_through_tower(const Operator& l, const std::vector<SpaceDescriptor>& levels, std::size_t m,
                            std::size_t j);

/// nu(L) on X_m against nu(L∘Q_{m,j}) on X_{m+j} for random L, plus the
/// monotone check on level m+j+1 when the tower has it.
SuiteReport lcc_check(const SpaceDescriptor& tower, std::size_t m, std::size_t j, int cases,
                      const ExperimentOptions& options, std::uint64_t seed);

/// nu(L) on the block sum Z_W against nu(L∘P_W) on the whole space.
SuiteReport gcc_check(const SpaceDescriptor& space, const std::vector<std::size_t>& blocks, int cases,
                      const ExperimentOptions& options, std::uint64_t seed);

enum class SumMode { linf, l1 };
SumMode parse_sum_mode(const std::string& text);
const char* to_string(SumMode mode);

/// |n^(sum) - min_i n^(X_i)| for the l_inf or l_1 sum of the summands.
SuiteReport sum_index_check(const std::vector<SpaceDescriptor>& summands, SumMode mode,
                            const ExperimentOptions& options, std::uint64_t seed);

struct SweepPoint {
  std::size_t m = 0;
  IndexEstimate estimate;
};

/// n^(l_p^m) along the given dimensions (ascending); each level starts from
/// the zero-padded witness of the previous one.
std::vector<SweepPoint> index_sweep(Exponent p, const std::vector<std::size_t>& dims, Field field,
                                    const ExperimentOptions& options, std::uint64_t seed);

/// Nonincreasing check on index_sweep within 0.02.
SuiteReport monotone_sweep(Exponent p, const std::vector<std::size_t>& dims, Field field,
                           const ExperimentOptions& options, std::uint64_t seed);

/// |nu(T) - nu(T*)| for random T and n^(X*) <= n^(X) + 0.05.
SuiteReport duality_check(const SpaceDescriptor& space, int cases, const ExperimentOptions& options,
                          std::uint64_t seed);

/// For every (p, m): n^ >= M_p/2 - 0.02 (hard) and n^ <= M_p + 0.05 (soft);
/// records the m = 2 curve over `curve_ps`.
SuiteReport bounds_check(const std::vector<double>& ps, const std::vector<std::size_t>& dims,
                         const std::vector<double>& curve_ps, const ExperimentOptions& options, std::uint64_t seed);

/// Default configurations behind `verify --suite <name>`; "all" runs every one.
std::vector<SuiteReport> run_default_suite(const std::string& name, const ExperimentOptions& options,
                                           std::uint64_t seed);
/// Names accepted by run_default_suite.
const std::vector<std::string>& default_suite_names();

/// FNV-1a over the bytes of `text`, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace numidx
