#include "numidx/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <optional>
#include <thread>

#include "numidx/descriptor_text.hpp"

namespace numidx {

namespace {

constexpr double kExactTolerance = 1e-9;
constexpr double kAscentTolerance = 1e-4;
constexpr double kIndexTolerance = 0.05;
constexpr double kSweepSlack = 0.02;
constexpr double kBoundSlack = 0.02;
constexpr double kRangeSlack = 1e-6;

template <typename T, typename F>
std::vector<T> parallel_cases(int count, int threads, F&& fn) {
  std::vector<std::optional<T>> slots(static_cast<std::size_t>(std::max(count, 0)));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < count; i = next++) slots[i].emplace(fn(i));
  };
  const int n = std::clamp(threads, 1, std::max(count, 1));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  std::vector<T> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::string hash_inputs(const Operator& t, const std::string& extra = {}) {
  std::string text = serialize_descriptor(t.space()) + "|" + extra + "|";
  char buf[64];
  for (const Scalar& z : t.matrix().data()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g;", z.real(), z.imag());
    text += buf;
  }
  return fnv1a_hex(text);
}

NamedValue radius_value(std::string name, const RadiusEstimate& e) {
  return {std::move(name), e.value, to_string(e.method), to_string(e.guarantee)};
}

NamedValue index_value(std::string name, const IndexEstimate& e) {
  return {std::move(name), e.upper_bound, std::string("min-max/") + to_string(e.radius_method), "upper-bound"};
}

double pair_tolerance(const RadiusEstimate& a, const RadiusEstimate& b) {
  const bool exact = a.guarantee == Guarantee::exact_enumeration && b.guarantee == Guarantee::exact_enumeration;
  return exact ? kExactTolerance : kAscentTolerance;
}

Operator random_operator(const SpaceDescriptor& space, std::uint64_t seed, std::uint64_t tag, int c) {
  Rng rng = make_rng(seed, {tag, static_cast<std::uint64_t>(c)});
  return gaussian_operator(space, rng);
}

void check_index_dim(const SpaceDescriptor& space, const ExperimentOptions& options) {
  if (space.dim() > options.dim_cap)
    throw BudgetExceeded("dimension " + std::to_string(space.dim()) + " exceeds the index-suite cap " +
                         std::to_string(options.dim_cap));
}

Matrix pad(const Matrix& m, std::size_t n) {
  Matrix out(n);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = m(i, j);
  return out;
}

std::string exponent_text(Exponent p) { return p.is_infinite() ? "inf" : format_double(p.value()); }

}  // namespace

double SuiteReport::max_violation() const {
  double v = 0.0;
  for (const auto& c : checks)
    if (c.hard) v = std::max(v, c.max_violation);
  return v;
}

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckSummary& c) { return !c.hard || c.pass; });
}

CheckSummary& SuiteReport::check(const std::string& name) {
  for (auto& c : checks)
    if (c.name == name) return c;
  throw OutOfRange("unknown check '" + name + "'");
}

const CheckSummary& SuiteReport::check(const std::string& name) const {
  return const_cast<SuiteReport*>(this)->check(name);
}

void SuiteReport::add(CaseRecord record) {
  CheckSummary& c = check(record.check);
  record.pass = record.violation <= c.tolerance;
  c.max_violation = std::max(c.max_violation, record.violation);
  c.pass = c.max_violation <= c.tolerance;
  records.push_back(std::move(record));
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SpaceDescriptor make_tower(const std::vector<Exponent>& exponents, Field field) {
  SpaceDescriptor x = SpaceDescriptor::scalar(field);
  for (const Exponent& p : exponents) x = SpaceDescriptor::psum(p, {x, SpaceDescriptor::scalar(field)});
  return x;
}

std::vector<SpaceDescriptor> tower_levels(const SpaceDescriptor& tower) {
  std::vector<SpaceDescriptor> levels;
  SpaceDescriptor x = tower;
  while (true) {
    levels.push_back(x);
    if (x.is_leaf()) break;
    x = x.child(0);
  }
  std::reverse(levels.begin(), levels.end());
  return levels;
}

Operator lift_through_tower(const Operator& l, const std::vector<SpaceDescriptor>& levels, std::size_t m,
                            std::size_t j) {
  if (m < 1 || m + j > levels.size())
    throw OutOfRange("level " + std::to_string(m) + "+" + std::to_string(j) + " outside a tower of " +
                     std::to_string(levels.size()) + " levels");
  if (!(l.space() == levels[m - 1])) throw DescriptorMismatch("operator does not act on the requested level");
  Operator out = l;
  for (std::size_t k = m; k < m + j; ++k) out = compose_with_projection(out, coordinate_projection(levels[k], {0}));
  return out;
}

SuiteReport lcc_check(const SpaceDescriptor& tower, std::size_t m, std::size_t j, int cases,
                      const ExperimentOptions& options, std::uint64_t seed) {
  const auto levels = tower_levels(tower);
  if (j < 1 || m < 1 || m + j > levels.size())
    throw OutOfRange("tower has " + std::to_string(levels.size()) + " levels; need m + j <= levels with m, j >= 1");
  const bool monotone = m + j + 1 <= levels.size();

  SuiteReport report;
  report.suite = "lcc";
  report.descriptors = {serialize_descriptor(tower)};
  report.cases = cases;
  report.seed = seed;
  report.label = "m" + std::to_string(m) + "-j" + std::to_string(j);

  struct Outcome {
    CaseRecord invariance;
    std::optional<CaseRecord> increasing;
    double tolerance;
  };
  auto outcomes = parallel_cases<Outcome>(cases, options.threads, [&](int c) {
    const Operator l = random_operator(levels[m - 1], seed, 0x6c6363ULL, c);
    const std::uint64_t s = derive_seed(seed, {0x6c63ULL, static_cast<std::uint64_t>(c)});
    const RadiusEstimate a = numerical_radius(l, options.radius, derive_seed(s, {1}));
    const RadiusEstimate b = numerical_radius(lift_through_tower(l, levels, m, j), options.radius, derive_seed(s, {2}));
    Outcome o;
    o.tolerance = pair_tolerance(a, b);
    o.invariance = {"invariance", hash_inputs(l), {radius_value("nu(L)", a), radius_value("nu(L.Q)", b)},
                    std::abs(a.value - b.value), true};
    if (monotone) {
      const RadiusEstimate d =
          numerical_radius(lift_through_tower(l, levels, m, j + 1), options.radius, derive_seed(s, {3}));
      o.tolerance = std::max(o.tolerance, pair_tolerance(b, d));
      o.increasing = CaseRecord{"increasing", hash_inputs(l, "next"),
                                {radius_value("w(m+j)", b), radius_value("w(m+j+1)", d)},
                                std::max(0.0, b.value - d.value), true};
    }
    return o;
  });

  double tol = kExactTolerance;
  for (const auto& o : outcomes) tol = std::max(tol, o.tolerance);
  report.checks.push_back({"invariance", tol});
  if (monotone) report.checks.push_back({"increasing", tol});
  for (auto& o : outcomes) {
    report.add(std::move(o.invariance));
    if (o.increasing) report.add(std::move(*o.increasing));
  }
  return report;
}

SuiteReport gcc_check(const SpaceDescriptor& space, const std::vector<std::size_t>& blocks, int cases,
                      const ExperimentOptions& options, std::uint64_t seed) {
  const CoordinateProjection q = coordinate_projection(space, blocks);
  SuiteReport report;
  report.suite = "gcc";
  report.descriptors = {serialize_descriptor(space), serialize_descriptor(q.range)};
  report.cases = cases;
  report.seed = seed;
  std::string w;
  for (std::size_t b : blocks) w += (w.empty() ? "" : ",") + std::to_string(b);
  report.label = "W{" + w + "}";

  struct Outcome {
    CaseRecord record;
    double tolerance;
  };
  auto outcomes = parallel_cases<Outcome>(cases, options.threads, [&](int c) {
    const Operator l = random_operator(q.range, seed, 0x676363ULL, c);
    const std::uint64_t s = derive_seed(seed, {0x6763ULL, static_cast<std::uint64_t>(c)});
    const RadiusEstimate a = numerical_radius(l, options.radius, derive_seed(s, {1}));
    const RadiusEstimate b = numerical_radius(compose_with_projection(l, q), options.radius, derive_seed(s, {2}));
    return Outcome{{"invariance", hash_inputs(l), {radius_value("nu(L)", a), radius_value("nu(L.P_W)", b)},
                    std::abs(a.value - b.value), true},
                   pair_tolerance(a, b)};
  });
  double tol = kExactTolerance;
  for (const auto& o : outcomes) tol = std::max(tol, o.tolerance);
  report.checks.push_back({"invariance", tol});
  for (auto& o : outcomes) report.add(std::move(o.record));
  if (space.child_count() > 0 && space.exponent().is_infinite())
    report.notes.push_back("inf-sums: norms and projections only; no GCC claim is made for p = inf");
  return report;
}

SumMode parse_sum_mode(const std::string& text) {
  if (text == "linf") return SumMode::linf;
  if (text == "l1") return SumMode::l1;
  throw ParseError("mode", "expected linf or l1, got '" + text + "'");
}

const char* to_string(SumMode mode) { return mode == SumMode::linf ? "linf" : "l1"; }

SuiteReport sum_index_check(const std::vector<SpaceDescriptor>& summands, SumMode mode,
                            const ExperimentOptions& options, std::uint64_t seed) {
  if (summands.empty()) throw DegenerateInput("sum_index_check needs at least one summand");
  const SpaceDescriptor sum =
      SpaceDescriptor::psum(mode == SumMode::linf ? Exponent::infinity() : Exponent::one(), summands);
  check_index_dim(sum, options);

  SuiteReport report;
  report.suite = "sums";
  report.label = to_string(mode);
  report.seed = seed;
  report.cases = 1;
  report.descriptors.push_back(serialize_descriptor(sum));
  for (const auto& s : summands) report.descriptors.push_back(serialize_descriptor(s));
  report.checks.push_back({"sum-formula", kIndexTolerance});
  report.notes.push_back("both sides are upper bounds (best found); c_0 and l_inf sums coincide in finite dimension");

  auto parts = parallel_cases<IndexEstimate>(static_cast<int>(summands.size()) + 1, options.threads, [&](int i) {
    if (i == 0) return numerical_index_estimate(sum, options.index, derive_seed(seed, {0x73756dULL}));
    return numerical_index_estimate(summands[i - 1], options.index,
                                    derive_seed(seed, {0x737562ULL, static_cast<std::uint64_t>(i - 1)}));
  });
  CaseRecord r;
  r.check = "sum-formula";
  r.inputs_hash = fnv1a_hex(report.descriptors.front());
  r.values.push_back(index_value("n(sum)", parts[0]));
  double least = 1.0;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    r.values.push_back(index_value("n(X" + std::to_string(i - 1) + ")", parts[i]));
    least = std::min(least, parts[i].upper_bound);
  }
  r.values.push_back({"min_i n(X_i)", least, "min", "upper-bound"});
  r.violation = std::abs(parts[0].upper_bound - least);
  report.add(std::move(r));
  return report;
}

std::vector<SweepPoint> index_sweep(Exponent p, const std::vector<std::size_t>& dims, Field field,
                                    const ExperimentOptions& options, std::uint64_t seed) {
  if (dims.empty()) throw DegenerateInput("empty dimension range");
  std::vector<SweepPoint> out;
  std::optional<Matrix> warm;
  for (std::size_t m : dims) {
    if (m < 1) throw OutOfRange("dimension must be >= 1");
    const SpaceDescriptor space = SpaceDescriptor::lp(p, m, field);
    check_index_dim(space, options);
    IndexOptions io = options.index;
    if (warm && warm->size() <= m) io.warm_start = pad(*warm, m);
    IndexEstimate e = numerical_index_estimate(space, io, derive_seed(seed, {0x737770ULL, m}));
    warm = std::get<Operator>(e.witness).matrix();
    out.push_back({m, std::move(e)});
  }
  return out;
}

SuiteReport monotone_sweep(Exponent p, const std::vector<std::size_t>& dims, Field field,
                           const ExperimentOptions& options, std::uint64_t seed) {
  std::vector<std::size_t> sorted = dims;
  std::sort(sorted.begin(), sorted.end());
  const auto points = index_sweep(p, sorted, field, options, seed);
  SuiteReport report;
  report.suite = "monotone";
  report.label = "p" + exponent_text(p);
  report.seed = seed;
  report.cases = static_cast<int>(points.size());
  report.checks.push_back({"nonincreasing", kSweepSlack});
  report.checks.push_back({"range", kRangeSlack});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    const std::string text = serialize_descriptor(SpaceDescriptor::lp(p, pt.m, field));
    report.descriptors.push_back(text);
    CaseRecord r{"nonincreasing", fnv1a_hex(text), {index_value("n(m=" + std::to_string(pt.m) + ")", pt.estimate)}};
    if (i > 0) {
      r.values.push_back(index_value("n(previous)", points[i - 1].estimate));
      r.violation = std::max(0.0, pt.estimate.upper_bound - points[i - 1].estimate.upper_bound);
    }
    report.add(std::move(r));
    report.add(CaseRecord{"range", fnv1a_hex(text), {index_value("n", pt.estimate)},
                          std::max({0.0, pt.estimate.upper_bound - 1.0, -pt.estimate.upper_bound})});
  }
  return report;
}

SuiteReport duality_check(const SpaceDescriptor& space, int cases, const ExperimentOptions& options,
                          std::uint64_t seed) {
  const SpaceDescriptor dual = dual_descriptor(space);
  SuiteReport report;
  report.suite = "duality";
  report.descriptors = {serialize_descriptor(space), serialize_descriptor(dual)};
  report.cases = cases;
  report.seed = seed;

  struct Outcome {
    CaseRecord record;
    double tolerance;
  };
  auto outcomes = parallel_cases<Outcome>(cases, options.threads, [&](int c) {
    const Operator t = random_operator(space, seed, 0x647561ULL, c);
    const std::uint64_t s = derive_seed(seed, {0x6475ULL, static_cast<std::uint64_t>(c)});
    const RadiusEstimate a = numerical_radius(t, options.radius, derive_seed(s, {1}));
    const RadiusEstimate b = numerical_radius(adjoint(t), options.radius, derive_seed(s, {2}));
    return Outcome{{"adjoint-radius", hash_inputs(t), {radius_value("nu(T)", a), radius_value("nu(T*)", b)},
                    std::abs(a.value - b.value), true},
                   pair_tolerance(a, b)};
  });
  double tol = kExactTolerance;
  for (const auto& o : outcomes) tol = std::max(tol, o.tolerance);
  report.checks.push_back({"adjoint-radius", tol});
  report.checks.push_back({"dual-index", kIndexTolerance});
  for (auto& o : outcomes) report.add(std::move(o.record));

  if (space.dim() <= options.dim_cap) {
    auto idx = parallel_cases<IndexEstimate>(2, options.threads, [&](int i) {
      return numerical_index_estimate(i == 0 ? space : dual, options.index, derive_seed(seed, {0x6469ULL}));
    });
    report.add(CaseRecord{"dual-index", fnv1a_hex(report.descriptors[0] + "|" + report.descriptors[1]),
                          {index_value("n(X)", idx[0]), index_value("n(X*)", idx[1])},
                          std::max(0.0, idx[1].upper_bound - idx[0].upper_bound)});
  } else {
    report.notes.push_back("index comparison skipped: dimension above the index-suite cap");
  }
  return report;
}

SuiteReport bounds_check(const std::vector<double>& ps, const std::vector<std::size_t>& dims,
                         const std::vector<double>& curve_ps, const ExperimentOptions& options, std::uint64_t seed) {
  SuiteReport report;
  report.suite = "bounds";
  report.seed = seed;
  report.checks.push_back({"lower-bound", kBoundSlack});
  report.checks.push_back({"upper-bound-quality", 0.05, 0.0, true, false});
  report.checks.push_back({"range", kRangeSlack});
  report.notes.push_back("the gap between the best-found upper bound and M_p is reported; no conclusion is drawn");

  struct Job {
    double p;
    std::size_t m;
    bool curve;
  };
  std::vector<Job> jobs;
  for (double p : ps)
    for (std::size_t m : dims) jobs.push_back({p, m, false});
  for (double p : curve_ps) jobs.push_back({p, 2, true});
  for (const Job& job : jobs) {
    if (!(job.p >= 1.0) || std::isinf(job.p)) throw OutOfRange("bounds_check needs finite p >= 1");
    check_index_dim(SpaceDescriptor::lp(Exponent::of(job.p), job.m), options);
  }
  report.cases = static_cast<int>(jobs.size());

  auto estimates = parallel_cases<IndexEstimate>(static_cast<int>(jobs.size()), options.threads, [&](int i) {
    const Job& job = jobs[i];
    return numerical_index_estimate(SpaceDescriptor::lp(Exponent::of(job.p), job.m), options.index,
                                    derive_seed(seed, {0x626e64ULL, static_cast<std::uint64_t>(i)}));
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    const SpaceDescriptor space = SpaceDescriptor::lp(Exponent::of(job.p), job.m);
    const std::string text = serialize_descriptor(space);
    const double mp = mp_constant(job.p).value;
    const IndexEstimate& e = estimates[i];
    std::vector<NamedValue> values = {index_value("n", e), {"M_p", mp, "scan+golden-section", "closed-form"},
                                      {"M_p/2", mp / 2.0, "scan+golden-section", "closed-form"}};
    if (job.curve) {
      report.add(CaseRecord{"range", fnv1a_hex(text + "|curve"), values,
                            std::max({0.0, e.upper_bound - 1.0, -e.upper_bound})});
      continue;
    }
    report.descriptors.push_back(text);
    report.add(CaseRecord{"lower-bound", fnv1a_hex(text), values, std::max(0.0, mp / 2.0 - e.upper_bound)});
    report.add(CaseRecord{"upper-bound-quality", fnv1a_hex(text), values, std::max(0.0, e.upper_bound - mp)});
  }
  return report;
}

const std::vector<std::string>& default_suite_names() {
  static const std::vector<std::string> names = {"lcc", "gcc", "sums", "duality", "bounds", "all"};
  return names;
}

std::vector<SuiteReport> run_default_suite(const std::string& name, const ExperimentOptions& options,
                                           std::uint64_t seed) {
  const auto& names = default_suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ParseError("suite", "unknown suite '" + name + "'");
  const bool all = name == "all";
  std::vector<SuiteReport> out;
  const Exponent p3 = Exponent::of(3.0), p15 = Exponent::of(1.5);
  if (all || name == "lcc") {
    out.push_back(lcc_check(make_tower({p3, p3, p3}), 2, 1, 50, options, derive_seed(seed, {1, 1})));
    out.back().label = "l3-tower-" + out.back().label;
    out.push_back(lcc_check(make_tower({Exponent::one(), Exponent::one()}), 2, 1, 50, options,
                            derive_seed(seed, {1, 2})));
    out.back().label = "l1-tower-" + out.back().label;
    out.push_back(lcc_check(make_tower({p3, p15, Exponent::of(2.0)}), 1, 2, 20, options, derive_seed(seed, {1, 3})));
    out.back().label = "mixed-tower-" + out.back().label;
  }
  if (all || name == "gcc") {
    out.push_back(gcc_check(SpaceDescriptor::lp(p15, 3), {0, 1}, 50, options, derive_seed(seed, {2, 1})));
    out.back().label = "l1.5-sum-" + out.back().label;
    out.push_back(gcc_check(SpaceDescriptor::lp(Exponent::one(), 3), {0, 2}, 50, options, derive_seed(seed, {2, 2})));
    out.back().label = "l1-sum-" + out.back().label;
    out.push_back(gcc_check(SpaceDescriptor::psum(Exponent::of(2.0), {SpaceDescriptor::lp(p3, 2), SpaceDescriptor::scalar()}),
                            {0}, 20, options, derive_seed(seed, {2, 3})));
    out.back().label = "nested-sum-" + out.back().label;
  }
  if (all || name == "sums") {
    const SpaceDescriptor r = SpaceDescriptor::scalar();
    out.push_back(sum_index_check({r, r}, SumMode::linf, options, derive_seed(seed, {3, 1})));
    out.back().label = "R+R-" + out.back().label;
    out.push_back(sum_index_check({SpaceDescriptor::lp(Exponent::of(2.0), 2), r}, SumMode::l1, options,
                                  derive_seed(seed, {3, 2})));
    out.back().label = "l2^2+R-" + out.back().label;
    out.push_back(sum_index_check({r, r, r}, SumMode::l1, options, derive_seed(seed, {3, 3})));
    out.back().label = "R+R+R-" + out.back().label;
  }
  if (all || name == "duality") {
    out.push_back(duality_check(SpaceDescriptor::lp(p3, 2), 50, options, derive_seed(seed, {4, 1})));
    out.back().label = "l3^2";
    out.push_back(duality_check(SpaceDescriptor::lp(Exponent::of(2.0), 3), 50, options, derive_seed(seed, {4, 2})));
    out.back().label = "l2^3";
  }
  if (all || name == "bounds") {
    std::vector<double> curve;
    for (int k = 2; k <= 12; ++k) curve.push_back(0.5 * k);
    out.push_back(bounds_check({1.0, 1.5, 2.0, 3.0}, {2}, curve, options, derive_seed(seed, {5, 1})));
    out.back().label = "lp^2";
  }
  return out;
}

}  // namespace numidx
