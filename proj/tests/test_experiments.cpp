#include <doctest.h>

#include <cmath>

#include "numidx/cli.hpp"
#include "numidx/descriptor_text.hpp"
#include "numidx/experiments.hpp"

using namespace numidx;

namespace {

SpaceDescriptor flat(double p, std::size_t m) { return SpaceDescriptor::lp(Exponent::of(p), m); }

ExperimentOptions quick(int budget = 30) {
  ExperimentOptions o;
  o.index.budget = budget;
  return o;
}

std::vector<Exponent> exps(std::initializer_list<double> ps) {
  std::vector<Exponent> out;
  for (double p : ps) out.push_back(std::isinf(p) ? Exponent::infinity() : Exponent::of(p));
  return out;
}

}  // namespace

TEST_CASE("towers and lifts") {
  const auto tower = make_tower(exps({3.0, 3.0, 3.0}));
  const auto levels = tower_levels(tower);
  REQUIRE(levels.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(levels[k].dim() == k + 1);
  CHECK(levels[0] == SpaceDescriptor::scalar());
  CHECK(levels[3] == tower);

  const Operator l(levels[1], Matrix(2, {Scalar(1), Scalar(2), Scalar(3), Scalar(4)}));
  const auto lifted = lift_through_tower(l, levels, 2, 2);
  CHECK(lifted.space() == levels[3]);
  CHECK(lifted.matrix()(1, 1) == Scalar(4));
  CHECK(lifted.matrix()(2, 2) == Scalar(0));
  CHECK(lifted.matrix()(3, 0) == Scalar(0));
  const auto id = lift_through_tower(Operator::identity(levels[1]), levels, 2, 1);
  CHECK(numerical_radius(id, {}, 1).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(numerical_radius(Operator::identity(levels[1]), {}, 1).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(numerical_radius(lift_through_tower(Operator::zero(levels[1]), levels, 2, 1), {}, 1).value == 0.0);
  CHECK_THROWS_AS(lift_through_tower(l, levels, 2, 3), OutOfRange);
  CHECK_THROWS_AS(lift_through_tower(l, levels, 1, 1), DescriptorMismatch);
}

TEST_CASE("lcc invariance on smooth and exact towers") {
  const auto smooth = lcc_check(make_tower(exps({3.0, 3.0, 3.0})), 2, 1, 50, quick(), 11);
  CHECK(smooth.pass());
  CHECK(smooth.max_violation() <= 1e-4);
  CHECK(smooth.records.size() == 100);
  CHECK(smooth.check("increasing").pass);

  const auto exact = lcc_check(make_tower(exps({1.0, 1.0, 1.0})), 2, 1, 50, quick(), 12);
  CHECK(exact.check("invariance").tolerance == 1e-9);
  CHECK(exact.max_violation() <= 1e-9);

  const auto mixed = lcc_check(make_tower(exps({3.0, 1.5, 2.0})), 1, 2, 10, quick(), 13);
  CHECK(mixed.pass());
  CHECK_THROWS_AS(lcc_check(make_tower(exps({3.0})), 1, 2, 1, quick(), 1), OutOfRange);
}

TEST_CASE("gcc invariance on block sums") {
  const auto a = gcc_check(flat(1.5, 3), {0, 1}, 50, quick(), 21);
  CHECK(a.pass());
  CHECK(a.max_violation() <= 1e-4);
  const auto all = gcc_check(flat(1.5, 3), {0, 1, 2}, 10, quick(), 21);
  CHECK(all.max_violation() <= 1e-12);
  const auto exact = gcc_check(SpaceDescriptor::lp(Exponent::one(), 3), {0, 2}, 50, quick(), 22);
  CHECK(exact.max_violation() <= 1e-9);
  const auto nested = gcc_check(SpaceDescriptor::psum(Exponent::of(2.0), {SpaceDescriptor::lp(Exponent::of(3.0), 2), SpaceDescriptor::scalar()}), {0}, 20, quick(), 23);
  CHECK(nested.pass());
  CHECK_THROWS_AS(gcc_check(flat(1.5, 3), {}, 1, quick(), 1), DegenerateInput);
  CHECK_THROWS_AS(gcc_check(flat(1.5, 3), {5}, 1, quick(), 1), OutOfRange);
}

TEST_CASE("sum formula") {
  const auto r = sum_index_check({SpaceDescriptor::scalar(), SpaceDescriptor::scalar()}, SumMode::linf, quick(), 31);
  CHECK(r.pass());
  CHECK(r.records.front().values.front().value >= 0.95);
  const auto h = sum_index_check({flat(2.0, 2), SpaceDescriptor::scalar()}, SumMode::l1, quick(60), 32);
  CHECK(h.pass());
  CHECK(h.records.front().values.front().value <= 0.05);
  CHECK(parse_sum_mode("l1") == SumMode::l1);
  CHECK_THROWS_AS(parse_sum_mode("l2"), ParseError);
  CHECK_THROWS_AS(sum_index_check({flat(2.0, 4), flat(2.0, 3)}, SumMode::l1, quick(), 1), BudgetExceeded);
}

TEST_CASE("monotone sweeps") {
  const auto l3 = monotone_sweep(Exponent::of(3.0), {1, 2, 3}, Field::real, quick(40), 41);
  CHECK(l3.pass());
  CHECK(l3.records.front().values.front().value >= 1.0 - 1e-9);
  const auto l2 = index_sweep(Exponent::of(2.0), {2, 3}, Field::real, quick(), 42);
  for (const auto& pt : l2) CHECK(pt.estimate.upper_bound <= 1e-6);
  const auto l1 = monotone_sweep(Exponent::one(), {2, 3, 4}, Field::real, quick(20), 43);
  CHECK(l1.pass());
  CHECK_THROWS_AS(index_sweep(Exponent::of(3.0), {}, Field::real, quick(), 1), DegenerateInput);
  CHECK_THROWS_AS(index_sweep(Exponent::of(3.0), {7}, Field::real, quick(), 1), BudgetExceeded);
}

TEST_CASE("duality") {
  const auto a = duality_check(flat(3.0, 2), 20, quick(), 51);
  CHECK(a.pass());
  CHECK(a.check("adjoint-radius").max_violation <= 1e-4);
  const auto h = duality_check(flat(2.0, 3), 20, quick(), 52);
  CHECK(h.pass());
}

TEST_CASE("bounds check") {
  const auto r = bounds_check({1.5, 3.0}, {2}, {}, quick(60), 61);
  CHECK(r.pass());
  CHECK(r.check("lower-bound").hard);
  CHECK_FALSE(r.check("upper-bound-quality").hard);
  CHECK_THROWS_AS(bounds_check({0.5}, {2}, {}, quick(), 1), OutOfRange);
}

TEST_CASE("reports are deterministic and independent of the thread count") {
  const auto tower = make_tower(exps({3.0, 3.0, 3.0}));
  ExperimentOptions one = quick(), three = quick();
  three.threads = 3;
  const auto a = suite_report_json(lcc_check(tower, 2, 1, 12, one, 71));
  const auto b = suite_report_json(lcc_check(tower, 2, 1, 12, one, 71));
  const auto c = suite_report_json(lcc_check(tower, 2, 1, 12, three, 71));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(suite_report_json(lcc_check(tower, 2, 1, 12, one, 72)) != a);
}

TEST_CASE("doubling the radius budget does not grow violations") {
  const auto tower = make_tower(exps({3.0, 3.0, 3.0}));
  ExperimentOptions a = quick(), b = quick();
  a.radius.ascent.restarts = 8;
  b.radius.ascent.restarts = 16;
  const double va = lcc_check(tower, 2, 1, 20, a, 81).max_violation();
  const double vb = lcc_check(tower, 2, 1, 20, b, 81).max_violation();
  CHECK(vb <= va + 1e-12);
}

TEST_CASE("default suite names and hashing") {
  const auto& names = default_suite_names();
  CHECK(std::find(names.begin(), names.end(), "all") != names.end());
  CHECK_THROWS_AS(run_default_suite("nope", quick(), 1), ParseError);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
