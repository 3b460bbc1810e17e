#include <doctest.h>

#include <cmath>
#include <numbers>

#include "numidx/index.hpp"
#include "oracles.hpp"

using namespace numidx;

namespace {

SpaceDescriptor flat(double p, std::size_t m, Field field = Field::real) {
  if (std::isinf(p)) return SpaceDescriptor::lp(Exponent::infinity(), m, field);
  return SpaceDescriptor::lp(Exponent::of(p), m, field);
}

IndexOptions budget(int b) {
  IndexOptions o;
  o.budget = b;
  return o;
}

const Operator& witness_op(const IndexEstimate& e) { return std::get<Operator>(e.witness); }

}  // namespace

TEST_CASE("M_p examples") {
  CHECK(std::abs(mp_constant(2.0).value) <= 1e-12);
  CHECK(std::abs(mp_constant(1.0).value - 1.0) <= 1e-9);
  CHECK(mp_constant(1.0).argmax_t == 0.0);
  for (double p : {1.5, 3.0, 4.0}) CHECK(mp_constant(p).value > 1e-3);
  CHECK_THROWS_AS(mp_constant(0.5), OutOfRange);
  CHECK_THROWS_AS(mp_constant(std::numeric_limits<double>::infinity()), OutOfRange);
}

TEST_CASE("M_p agrees with a fine scan") {
  for (double p : {1.25, 1.5, 3.0, 4.0, 6.0}) {
    const auto r = mp_constant(p);
    const double ref = oracle::mp_scan(p);
    CHECK(r.value >= ref - 1e-12);
    CHECK(r.value - ref <= 1e-9);
    const double t = r.argmax_t;
    CHECK(std::abs(std::abs(std::pow(t, p - 1.0) - t) / (1.0 + std::pow(t, p)) - r.value) <= 1e-12);
  }
}

TEST_CASE("M_p vanishes only at p = 2 and varies continuously") {
  for (int k = 0; k <= 50; ++k) {
    const double v = mp_constant(1.0 + 0.1 * k).value;
    if (k == 10) CHECK(v <= 1e-12);
    else CHECK(v > 1e-4);
  }
  double prev = mp_constant(1.2).value;
  for (int k = 1; k <= 480; ++k) {
    const double v = mp_constant(1.2 + 0.01 * k).value;
    CHECK(std::abs(v - prev) <= 0.02);
    prev = v;
  }
}

TEST_CASE("absolute index closed form") {
  CHECK(absolute_index_target(2.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double p : {1.5, 3.0, 4.0, 10.0}) CHECK(std::abs(absolute_index_target(p) - oracle::absolute_index_closed_form(p)) <= 1e-12);
  CHECK(absolute_index_target(4.0) == doctest::Approx(absolute_index_target(4.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("theoretical bounds") {
  const auto h = theoretical_bounds(flat(2.0, 2));
  CHECK(h.lower == 0.0);
  CHECK(h.upper == doctest::Approx(0.0).epsilon(1e-12));
  const auto hc = theoretical_bounds(flat(2.0, 2, Field::complex));
  CHECK(hc.lower >= 1.0 / std::numbers::e - 1e-15);
  CHECK(theoretical_bounds(flat(1.0, 3)).lower == 1.0);
  CHECK(theoretical_bounds(flat(std::numeric_limits<double>::infinity(), 2)).upper == 1.0);
  const auto b3 = theoretical_bounds(flat(3.0, 2));
  CHECK(b3.lower == doctest::Approx(mp_constant(3.0).value / 2.0).epsilon(1e-12));
  CHECK(b3.upper == doctest::Approx(mp_constant(3.0).value).epsilon(1e-12));
  CHECK_FALSE(b3.lower_source.empty());
}

TEST_CASE("Hilbert space indices") {
  const auto real = numerical_index_estimate(flat(2.0, 2), budget(50), 1);
  CHECK(real.upper_bound <= 1e-6);
  const auto complex = numerical_index_estimate(flat(2.0, 2, Field::complex), budget(200), 1);
  CHECK(complex.upper_bound >= 0.45);
  CHECK(complex.upper_bound <= 0.55);
  CHECK(complex.field == Field::complex);
}

TEST_CASE("index-one spaces") {
  for (double p : {1.0, std::numeric_limits<double>::infinity()}) {
    const auto e = numerical_index_estimate(flat(p, 3), budget(50), 2);
    CHECK(e.upper_bound >= 0.95);
    CHECK(e.upper_bound <= 1.0 + 1e-6);
  }
}

TEST_CASE("estimate is a witnessed ratio") {
  const auto e = numerical_index_estimate(flat(3.0, 2), budget(60), 3);
  const auto& t = witness_op(e);
  CHECK(e.witness_norm.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.upper_bound == doctest::Approx(e.witness_radius.value / e.witness_norm.value).epsilon(1e-12));
  CHECK(std::abs(recompute_ratio(e, 99) - e.upper_bound) <= 1e-6);
  CHECK(std::abs(norm_at(t, e.witness_norm.witness) - e.witness_norm.value) <= 1e-12);
  CHECK(e.upper_bound >= e.bounds.lower - 0.02);
  CHECK(e.upper_bound <= mp_constant(3.0).value + 0.05);
  CHECK(e.evaluations == 60);
}

TEST_CASE("larger budgets extend smaller ones") {
  const auto s = flat(1.5, 3);
  const auto a = numerical_index_estimate(s, budget(20), 4);
  const auto b = numerical_index_estimate(s, budget(40), 4);
  CHECK(b.upper_bound <= a.upper_bound + 1e-12);
  const auto again = numerical_index_estimate(s, budget(20), 4);
  CHECK(again.upper_bound == a.upper_bound);
  CHECK(witness_op(again).matrix() == witness_op(a).matrix());
}

TEST_CASE("rank-restricted index") {
  const auto s = flat(2.0, 2);
  const auto r1 = rank_r_index_estimate(s, 1, budget(60), 5);
  CHECK(r1.upper_bound >= 1.0 / std::numbers::e - 0.02);
  CHECK(matrix_rank(witness_op(r1).matrix()) == 1);
  const auto r2 = rank_r_index_estimate(s, 2, budget(60), 5);
  CHECK(r2.upper_bound <= r1.upper_bound + 0.02);
  CHECK(r2.upper_bound <= 1e-6);
  const auto full = numerical_index_estimate(s, budget(60), 5);
  CHECK(std::abs(r2.upper_bound - full.upper_bound) <= 0.02);
  CHECK_THROWS_AS(rank_r_index_estimate(s, 3, budget(10), 5), OutOfRange);
}

TEST_CASE("absolute index") {
  const auto e = absolute_index_estimate(flat(2.0, 2), budget(60), 6);
  CHECK(std::abs(e.upper_bound - 0.5) <= 0.05);
  REQUIRE(e.target.has_value());
  CHECK(*e.target == doctest::Approx(0.5).epsilon(1e-15));
  const auto n = numerical_index_estimate(flat(3.0, 2), budget(40), 6);
  const auto a = absolute_index_estimate(flat(3.0, 2), budget(40), 6);
  CHECK(a.upper_bound >= n.upper_bound - 0.02);
  CHECK(a.upper_bound <= 1.0 + 1e-9);
  CHECK_THROWS_AS(absolute_index_estimate(flat(1.0, 2), budget(10), 6), OutOfRange);
  CHECK_THROWS_AS(absolute_index_estimate(flat(2.0, 1), budget(10), 6), DegenerateInput);
}

TEST_CASE("polynomial index") {
  const auto s = flat(3.0, 2);
  const auto k1 = poly_index_estimate(s, 1, budget(40), 7);
  const auto n = numerical_index_estimate(s, budget(40), 7);
  CHECK(std::abs(k1.upper_bound - n.upper_bound) <= 0.02);
  const auto k2 = poly_index_estimate(flat(2.0, 2), 2, budget(20), 7);
  CHECK(k2.upper_bound >= 0.0);
  CHECK(k2.upper_bound <= 1.0);
  CHECK(k2.degree == 2);
  CHECK(std::holds_alternative<HomogeneousPolynomial>(k2.witness));
  CHECK(std::abs(recompute_ratio(k2, 3) - k2.upper_bound) <= 1e-6);
}
