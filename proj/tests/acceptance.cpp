// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any hard criterion fails. argv[1] is the path of the numidx binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "numidx/descriptor_text.hpp"
#include "numidx/experiments.hpp"
#include "numidx/index.hpp"
#include "numidx/radius.hpp"

using namespace numidx;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string soft = {};  // logged only
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;
  std::function<Outcome()> run;
};

constexpr std::uint64_t kSeed = kDefaultSeed;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

SpaceDescriptor flat(double p, std::size_t m, Field field = Field::real) {
  if (std::isinf(p)) return SpaceDescriptor::lp(Exponent::infinity(), m, field);
  return SpaceDescriptor::lp(Exponent::of(p), m, field);
}

IndexOptions budget(int b) {
  IndexOptions o;
  o.budget = b;
  return o;
}

Operator random_op(const SpaceDescriptor& s, std::uint64_t tag, int k) {
  Rng rng = make_rng(kSeed, {tag, static_cast<std::uint64_t>(k)});
  return gaussian_operator(s, rng);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

Outcome identity_radius() {
  std::vector<SpaceDescriptor> spaces;
  for (double p : {1.0, 1.5, 2.0, 3.0, kInf})
    for (std::size_t m : {2, 3}) spaces.push_back(flat(p, m));
  spaces.push_back(make_tower({Exponent::of(3.0), Exponent::of(1.5), Exponent::of(2.0)}));
  spaces.push_back(SpaceDescriptor::psum(Exponent::one(), {flat(kInf, 2), flat(3.0, 2)}));
  double worst = 0.0;
  for (const auto& s : spaces) worst = std::max(worst, std::abs(numerical_radius(Operator::identity(s), {}, kSeed).value - 1.0));
  return {worst <= 1e-9, std::to_string(spaces.size()) + " shapes, max |nu(Id) - 1| = " + fmt(worst)};
}

Outcome hilbert_real() {
  const auto e = numerical_index_estimate(flat(2.0, 2), budget(100), kSeed);
  const Matrix& t = std::get<Operator>(e.witness).matrix();
  double sym = 0.0, size = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      sym = std::max(sym, std::abs(t(i, j) + t(j, i)));
      size = std::max(size, std::abs(t(i, j)));
    }
  const bool antisymmetric = sym <= 1e-6 * size;
  return {e.upper_bound <= 1e-6 && antisymmetric,
          "upper bound " + fmt(e.upper_bound) + ", witness " + (antisymmetric ? "antisymmetric" : "not antisymmetric")};
}

Outcome hilbert_complex() {
  const auto e = numerical_index_estimate(flat(2.0, 2, Field::complex), budget(200), kSeed);
  return {e.upper_bound >= 0.45 && e.upper_bound <= 0.55, "upper bound " + fmt(e.upper_bound)};
}

Outcome index_one() {
  Outcome o;
  for (double p : {1.0, kInf})
    for (std::size_t m : {2, 3}) {
      const auto e = numerical_index_estimate(flat(p, m), budget(100), kSeed);
      o.pass = o.pass && e.upper_bound >= 0.95 && e.upper_bound <= 1.0 + 1e-6;
      o.detail += serialize_descriptor(flat(p, m)) + "=" + fmt(e.upper_bound) + " ";
    }
  return o;
}

Outcome mp_values() {
  const double m2 = mp_constant(2.0).value, m1 = mp_constant(1.0).value;
  bool pass = std::abs(m2) <= 1e-12 && std::abs(m1 - 1.0) <= 1e-9;
  std::string detail = "M_2=" + fmt(m2) + " M_1=" + fmt(m1);
  for (double p : {1.5, 3.0, 4.0}) {
    const double v = mp_constant(p).value;
    pass = pass && v > 1e-3;
    detail += " M_" + fmt(p) + "=" + fmt(v);
  }
  return {pass, detail};
}

Outcome bounds_at_desk_scale() {
  Outcome o;
  for (double p : {1.5, 3.0}) {
    const double mp = mp_constant(p).value;
    const auto e = numerical_index_estimate(flat(p, 2), budget(100), kSeed);
    o.pass = o.pass && e.upper_bound >= mp / 2.0 - 0.02;
    o.detail += "p=" + fmt(p) + ": n=" + fmt(e.upper_bound) + " M_p/2=" + fmt(mp / 2.0) + " ";
    o.soft += "p=" + fmt(p) + " n<=M_p+0.05: " + (e.upper_bound <= mp + 0.05 ? "yes" : "no") + " ";
  }
  return o;
}

Outcome monotonicity() {
  ExperimentOptions eo;
  const auto r = monotone_sweep(Exponent::of(3.0), {1, 2, 3, 4}, Field::real, eo, kSeed);
  const auto pts = index_sweep(Exponent::of(3.0), {1}, Field::real, eo, kSeed);
  std::string detail = "n(l_3^m):";
  for (const auto& rec : r.records)
    if (rec.check == "nonincreasing") detail += " " + fmt(rec.values.front().value);
  const bool one = std::abs(pts.front().estimate.upper_bound - 1.0) <= 1e-6;
  return {r.pass() && one, detail + ", max increase " + fmt(r.check("nonincreasing").max_violation)};
}

Outcome invariance() {
  ExperimentOptions eo;
  const auto smooth = lcc_check(make_tower({Exponent::of(3.0), Exponent::of(3.0), Exponent::of(3.0)}), 2, 1, 50, eo, kSeed);
  const auto sum = gcc_check(flat(1.5, 3), {0, 1}, 50, eo, kSeed);
  const auto exact = lcc_check(make_tower({Exponent::one(), Exponent::one(), Exponent::one()}), 2, 1, 50, eo, kSeed);
  const double vs = smooth.check("invariance").max_violation, vg = sum.check("invariance").max_violation,
               ve = exact.check("invariance").max_violation;
  return {vs <= 1e-4 && vg <= 1e-4 && ve <= 1e-9,
          "l_3 tower " + fmt(vs) + ", l_1.5 block sum " + fmt(vg) + ", l_1 tower (enumeration) " + fmt(ve)};
}

Outcome adjoint_symmetry() {
  ExperimentOptions eo;
  double worst = 0.0;
  for (const auto& s : {flat(2.0, 3), flat(3.0, 2)})
    worst = std::max(worst, duality_check(s, 50, eo, kSeed).check("adjoint-radius").max_violation);
  return {worst <= 1e-4, "max |nu(T) - nu(T*)| = " + fmt(worst)};
}

Outcome absolute_index() {
  const auto e = absolute_index_estimate(flat(2.0, 2), budget(100), kSeed);
  return {std::abs(e.upper_bound - 0.5) <= 0.05, "|n| = " + fmt(e.upper_bound) + ", closed form " + fmt(absolute_index_target(2.0))};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  const std::vector<double> ps = {1.0, 2.0, 3.0, kInf};
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (int k = 0; k < 20; ++k) {
      const double p = ps[i];
      const auto t = random_op(flat(p, 2), 0x0b00 + i, k);
      const double engine = numerical_radius(t, {}, kSeed).value;
      const double grid = radius_grid_oracle(t, 2000).value;
      worst = std::max(worst, std::abs(engine - grid));
    }
  return {worst <= 2e-3, "80 operators, max |engine - grid| = " + fmt(worst)};
}

Outcome rank_one_bound() {
  Outcome o;
  for (const auto& s : {flat(2.0, 2), flat(3.0, 2), flat(1.0, 3)}) {
    std::vector<double> chain;
    for (std::size_t r = 1; r <= s.dim(); ++r) chain.push_back(rank_r_index_estimate(s, r, budget(100), kSeed).upper_bound);
    bool ok = chain.front() >= 1.0 / std::numbers::e - 0.02;
    for (std::size_t r = 1; r < chain.size(); ++r) ok = ok && chain[r] <= chain[r - 1] + 0.02;
    o.pass = o.pass && ok;
    o.detail += serialize_descriptor(s) + ":";
    for (double v : chain) o.detail += " " + fmt(v);
    o.detail += " ";
  }
  return o;
}

Outcome absolute_sandwich() {
  // nu and |nu| come from different objective evaluations; their comparison
  // allows floating-point rounding only.
  constexpr double kRounding = 1e-12;
  double below = 0.0, above = 0.0, coincide = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0})
    for (std::size_t m : {2, 3}) {
      const auto s = flat(p, m);
      for (int k = 0; k < 100; ++k) {
        const auto t = random_op(s, 0x0d00 + static_cast<std::uint64_t>(10 * p + m), k);
        const double nu = numerical_radius(t, {}, kSeed).value;
        const double ab = absolute_radius(t, {}, kSeed).value;
        const double nt = op_norm(t, {}, kSeed).value;
        below = std::max(below, nu - ab);
        above = std::max(above, ab - nt);
        if (k < 50) {
          Matrix a = t.matrix();
          for (auto& v : a.data()) v = std::abs(v);
          const Operator pos(s, a);
          coincide = std::max(coincide, std::abs(numerical_radius(pos, {}, kSeed).value - absolute_radius(pos, {}, kSeed).value));
        }
      }
    }
  return {below <= kRounding && above <= 1e-6 && coincide <= 1e-4,
          "max nu - |nu| = " + fmt(below) + ", max |nu| - ||T|| = " + fmt(above) +
              ", nonnegative max |nu - |nu|| = " + fmt(coincide)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome end_to_end(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI binary given"};
  const fs::path base = fs::temp_directory_path() / ("numidx-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(base);
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = base / ("run" + std::to_string(k));
    fs::create_directories(dir);
    const std::string cmd = "\"" + cli + "\" verify --suite all --out-dir \"" + dir.string() + "\" > \"" +
                            (base / ("log" + std::to_string(k))).string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    codes[k] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::size_t compared = 0;
  bool identical = true;
  for (const auto& e : fs::directory_iterator(base / "run0")) {
    if (e.path().filename() == "manifest.json") continue;
    const fs::path other = base / "run1" / e.path().filename();
    identical = identical && fs::exists(other) && slurp(e.path()) == slurp(other);
    ++compared;
  }
  std::size_t other_count = 0;
  for (const auto& e : fs::directory_iterator(base / "run1")) other_count += e.path().filename() != "manifest.json";
  identical = identical && other_count == compared && compared > 0;
  const bool manifests = fs::exists(base / "run0" / "manifest.json") && fs::exists(base / "run1" / "manifest.json");
  fs::remove_all(base);
  return {codes[0] == 0 && codes[1] == 0 && identical && manifests,
          "exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) + ", " + std::to_string(compared) +
              " reports " + (identical ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria = {
      {1, "identity radius", 10, identity_radius},
      {2, "real Hilbert index zero", 5, hilbert_real},
      {3, "complex Hilbert index one half", 300, hilbert_complex},
      {4, "index-one spaces", 300, index_one},
      {5, "M_p constants", 1, mp_values},
      {6, "M_p bounds at desk scale", 600, bounds_at_desk_scale},
      {7, "monotonicity of n(l_3^m)", 900, monotonicity},
      {8, "projection invariance", 300, invariance},
      {9, "adjoint symmetry", 300, adjoint_symmetry},
      {10, "absolute index", 300, absolute_index},
      {11, "oracle equivalence", 600, oracle_equivalence},
      {12, "rank-one bound and rank chain", 600, rank_one_bound},
      {13, "absolute radius sandwich and coincidence", 300, absolute_sandwich},
      {14, "end-to-end determinism", 1800, [&] { return end_to_end(cli); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s %2d %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.detail.c_str(), secs,
                in_time ? "" : ", over time limit");
    if (!o.soft.empty()) std::printf("     soft: %s\n", o.soft.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
