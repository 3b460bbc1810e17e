#include "numidx/index.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace numidx {

namespace {

constexpr double kInitialStep = 0.3;
constexpr double kMinStep = 1e-3;
constexpr int kFailuresPerShrink = 6;
constexpr int kRandomStartPeriod = 5;

double mp_objective(double p, double t) { return std::abs(std::pow(t, p - 1.0) - t) / (1.0 + std::pow(t, p)); }

// Radius and norm of one candidate; `ratio` is +inf for a zero candidate.
struct Evaluation {
  RadiusEstimate radius;
  OperatorNormEstimate norm;
  double ratio = std::numeric_limits<double>::infinity();
};

template <typename Candidate>
struct SearchProblem {
  std::vector<Candidate> starts;
  std::function<Candidate(Rng&)> random_start;
  std::function<Candidate(const Candidate&, double, Rng&)> perturb;
  std::function<Evaluation(const Candidate&, const RadiusOptions&, const NormOptions&, std::uint64_t)> evaluate;
};

template <typename Candidate>
struct SearchResult {
  Candidate best;
  Evaluation evaluation;
  long evaluations = 0;
};

Evaluation merge(Evaluation a, Evaluation b) {
  Evaluation m;
  m.radius = a.radius.value >= b.radius.value ? std::move(a.radius) : std::move(b.radius);
  m.norm = a.norm.value >= b.norm.value ? std::move(a.norm) : std::move(b.norm);
  m.ratio = m.norm.value > 0.0 ? m.radius.value / m.norm.value : std::numeric_limits<double>::infinity();
  return m;
}

// Candidate stream: the structured starts in order, then perturbations of the
// incumbent interleaved with fresh random starts. Nothing in the stream depends
// on the budget.
template <typename Candidate>
SearchResult<Candidate> min_max_search(const SearchProblem<Candidate>& problem, const IndexOptions& options,
                                       std::uint64_t seed) {
  if (options.budget < 1) throw OutOfRange("index budget must be >= 1");
  RadiusOptions verify_radius = options.radius;
  verify_radius.ascent.restarts = std::max(1, options.radius.ascent.restarts * options.verify_factor);
  NormOptions verify_norm = options.norm;
  verify_norm.restarts = std::max(1, options.norm.restarts * options.verify_factor);

  std::optional<SearchResult<Candidate>> best;
  double step = kInitialStep;
  int failures = 0;
  long e = 0;
  for (; e < options.budget; ++e) {
    const auto index = static_cast<std::uint64_t>(e);
    bool perturbation = false;
    Candidate candidate = [&] {
      if (e < static_cast<long>(problem.starts.size())) return problem.starts[e];
      const std::uint64_t j = index - problem.starts.size();
      Rng rng = make_rng(seed, {0x6373ULL, j});
      if (!best || j % kRandomStartPeriod == kRandomStartPeriod - 1) return problem.random_start(rng);
      perturbation = true;
      return problem.perturb(best->best, step, rng);
    }();

    Evaluation screen = problem.evaluate(candidate, options.radius, options.norm, derive_seed(seed, {0x7363ULL, index}));
    bool accepted = false;
    if (!best || screen.ratio < best->evaluation.ratio) {
      Evaluation check = problem.evaluate(candidate, verify_radius, verify_norm, derive_seed(seed, {0x7663ULL, index}));
      Evaluation merged = merge(std::move(screen), std::move(check));
      if (std::isfinite(merged.ratio) && (!best || merged.ratio < best->evaluation.ratio)) {
        best = SearchResult<Candidate>{std::move(candidate), std::move(merged), 0};
        accepted = true;
      }
    }
    if (perturbation) {
      if (accepted) {
        failures = 0;
      } else if (++failures >= kFailuresPerShrink) {
        failures = 0;
        step *= 0.5;
        if (step < kMinStep) step = kInitialStep;
      }
    }
  }
  if (!best) throw DegenerateInput("index search found no candidate of nonzero norm");
  best->evaluations = e;
  return std::move(*best);
}

Matrix gaussian_matrix(std::size_t n, bool complex, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(n);
  for (auto& v : m.data()) {
    const double re = gauss(rng);
    v = complex ? Scalar(re, gauss(rng)) / std::sqrt(2.0) : Scalar(re, 0.0);
  }
  return m;
}

// Structured operator starts. Real spaces lead with a planar rotation (the
// Hilbert-space zero of the real index), complex spaces and the absolute
// index with the nilpotent shift.
std::vector<Matrix> structured_starts(const SpaceDescriptor& space, bool shift_first, std::uint64_t seed) {
  const std::size_t n = space.dim();
  const bool complex = space.field() == Field::complex;
  std::vector<Matrix> out;
  if (n == 1) {
    out.push_back(Matrix::identity(1));
    return out;
  }
  Matrix rotation(n);
  rotation(0, 1) = -1.0;
  rotation(1, 0) = 1.0;
  Matrix shift(n);
  for (std::size_t i = 0; i + 1 < n; ++i) shift(i, i + 1) = 1.0;
  Matrix corner(n);
  corner(0, 1) = 1.0;
  Matrix cyclic(n);
  for (std::size_t i = 0; i < n; ++i) cyclic(i, (i + 1) % n) = 1.0;

  if (shift_first) {
    out.push_back(shift);
    out.push_back(rotation);
  } else {
    out.push_back(rotation);
    out.push_back(shift);
  }
  if (n > 2) out.push_back(corner);
  out.push_back(cyclic);

  Rng rng = make_rng(seed, {0x7374ULL});
  Matrix g = gaussian_matrix(n, complex, rng);
  out.push_back(g + Scalar(-1.0) * transpose(g));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix r1(n);
  std::vector<Scalar> y(n), f(n);
  for (auto& v : y) v = gauss(rng);
  for (auto& v : f) v = gauss(rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r1(i, j) = y[i] * f[j];
  out.push_back(r1);
  out.push_back(gaussian_matrix(n, complex, rng));
  return out;
}

double max_abs_entry(const Matrix& m) {
  double s = 0.0;
  for (const auto& v : m.data()) s = std::max(s, std::abs(v));
  return s;
}

Matrix perturb_full(const Matrix& m, double step, bool complex, Rng& rng) {
  const double scale = step * std::max(max_abs_entry(m), 1e-3);
  return m + Scalar(scale) * gaussian_matrix(m.size(), complex, rng);
}

// (I + sE1) M (I + sE2): invertible factors keep the rank exactly.
Matrix perturb_rank_preserving(const Matrix& m, double step, bool complex, Rng& rng) {
  const std::size_t n = m.size();
  const double s = step / std::sqrt(static_cast<double>(n));
  Matrix left = Matrix::identity(n) + Scalar(s) * gaussian_matrix(n, complex, rng);
  Matrix right = Matrix::identity(n) + Scalar(s) * gaussian_matrix(n, complex, rng);
  return left * m * right;
}

Evaluation evaluate_operator(const SpaceDescriptor& space, const Matrix& m, bool absolute, const RadiusOptions& ro,
                             const NormOptions& no, std::uint64_t seed) {
  Operator t(space, m);
  Evaluation ev;
  ev.norm = op_norm(t, no, derive_seed(seed, {1}));
  ev.radius = absolute ? absolute_radius(t, ro, derive_seed(seed, {2})) : numerical_radius(t, ro, derive_seed(seed, {2}));
  if (ev.norm.value > 0.0) ev.ratio = ev.radius.value / ev.norm.value;
  return ev;
}

// Rescales the accepted witness to norm one and recomputes both certificates
// on the rescaled operator.
void finish_operator(IndexEstimate& out, const SpaceDescriptor& space, const Matrix& m, Evaluation ev, bool absolute) {
  const double nrm = ev.norm.value;
  Operator t(space, Scalar(1.0 / nrm) * m);
  ev.norm.value = norm_at(t, ev.norm.witness);
  if (absolute) {
    ev.radius.value = absolute_objective(t, ev.radius.witness.x.coords());
  } else {
    ev.radius.value = std::abs(eval(ev.radius.witness.xstar, apply(t, ev.radius.witness.x)));
  }
  out.upper_bound = ev.radius.value / ev.norm.value;
  out.radius_method = ev.radius.method;
  out.witness_radius = std::move(ev.radius);
  out.witness_norm = std::move(ev.norm);
  out.witness = std::move(t);
}

IndexEstimate operator_search(const SpaceDescriptor& space, std::size_t rank_cap, bool absolute,
                              const IndexOptions& options, std::uint64_t seed) {
  const std::size_t n = space.dim();
  const bool complex = space.field() == Field::complex;
  const bool restricted = rank_cap < n;

  SearchProblem<Matrix> problem;
  if (options.warm_start) {
    if (options.warm_start->size() != n) throw DescriptorMismatch("warm start has the wrong dimension");
    problem.starts.push_back(*options.warm_start);
  }
  for (Matrix& m : structured_starts(space, complex || absolute, seed))
    if (!restricted || matrix_rank(m) <= rank_cap) problem.starts.push_back(std::move(m));
  if (restricted) {
    problem.random_start = [&space, rank_cap, &options](Rng& rng) {
      return rank_r_sample(space, rank_cap, rng(), options.norm).matrix();
    };
    problem.perturb = [complex](const Matrix& m, double step, Rng& rng) {
      return perturb_rank_preserving(m, step, complex, rng);
    };
  } else {
    problem.random_start = [n, complex](Rng& rng) { return gaussian_matrix(n, complex, rng); };
    problem.perturb = [complex](const Matrix& m, double step, Rng& rng) { return perturb_full(m, step, complex, rng); };
  }
  problem.evaluate = [&space, absolute](const Matrix& m, const RadiusOptions& ro, const NormOptions& no,
                                        std::uint64_t s) { return evaluate_operator(space, m, absolute, ro, no, s); };

  SearchResult<Matrix> found = min_max_search(problem, options, seed);
  IndexEstimate out;
  finish_operator(out, space, found.best, std::move(found.evaluation), absolute);
  out.evaluations = found.evaluations;
  out.field = space.field();
  out.bounds = theoretical_bounds(space);
  return out;
}

bool index_one_space(const SpaceDescriptor& space) {
  if (space.dim() == 1) return true;
  if (!space.is_flat()) return false;
  const Exponent p = space.flat_exponent();
  return p.is_one() || p.is_infinite();
}

}  // namespace

MpResult mp_constant(double p) {
  if (!(p >= 1.0)) throw OutOfRange("M_p needs p >= 1");
  if (std::isinf(p)) throw OutOfRange("M_p needs a finite p");
  constexpr int kScan = 100000;
  int best_k = 0;
  double best = mp_objective(p, 0.0);
  for (int k = 1; k <= kScan; ++k) {
    const double v = mp_objective(p, static_cast<double>(k) / kScan);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  double a = std::max(0, best_k - 1) / static_cast<double>(kScan);
  double b = std::min(kScan, best_k + 1) / static_cast<double>(kScan);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = mp_objective(p, c), fd = mp_objective(p, d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = mp_objective(p, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = mp_objective(p, d);
    }
  }
  MpResult r{p, best, best_k / static_cast<double>(kScan)};
  for (double t : {a, b, 0.5 * (a + b)}) {
    const double v = mp_objective(p, t);
    if (v > r.value) {
      r.value = v;
      r.argmax_t = t;
    }
  }
  return r;
}

double absolute_index_target(double p) {
  if (!(p >= 1.0)) throw OutOfRange("absolute index target needs p >= 1");
  if (p == 1.0 || std::isinf(p)) return 1.0;
  const double q = p / (p - 1.0);
  return 1.0 / (std::pow(p, 1.0 / p) * std::pow(q, 1.0 / q));
}

TheoreticalBounds theoretical_bounds(const SpaceDescriptor& space) {
  TheoreticalBounds b;
  b.upper = 1.0;
  b.upper_source = "numerical radius never exceeds the norm";
  if (index_one_space(space)) {
    b.lower = 1.0;
    b.lower_source = space.dim() == 1 ? "scalar field has index 1" : "l_1^m and l_inf^m have index 1";
    return b;
  }
  if (space.field() == Field::complex) {
    b.lower = 1.0 / std::numbers::e;
    b.lower_source = "complex spaces: n(X) >= 1/e";
    if (space.is_flat() && space.flat_exponent() == Exponent::of(2.0)) b.note = "Hilbert space: n = 1/2 (complex)";
    return b;
  }
  b.lower = 0.0;
  b.lower_source = "real spaces: n(X) >= 0";
  if (space.is_flat()) {
    const Exponent p = space.flat_exponent();
    const double mp = mp_constant(p.value()).value;
    b.lower = mp / 2.0;
    b.upper = mp;
    b.lower_source = "real l_p^m: n >= M_p / 2";
    b.upper_source = "real l_p^m: n <= M_p";
    if (p == Exponent::of(2.0)) b.note = "Hilbert space: n = 0 (real)";
  }
  return b;
}

const char* to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::numerical: return "numerical";
    case IndexKind::rank: return "rank";
    case IndexKind::absolute: return "absolute";
    case IndexKind::polynomial: return "polynomial";
  }
  return "?";
}

IndexEstimate numerical_index_estimate(const SpaceDescriptor& space, const IndexOptions& options, std::uint64_t seed) {
  IndexEstimate out = operator_search(space, space.dim(), false, options, seed);
  out.kind = IndexKind::numerical;
  return out;
}

IndexEstimate rank_r_index_estimate(const SpaceDescriptor& space, std::size_t r, const IndexOptions& options,
                                    std::uint64_t seed) {
  if (r < 1 || r > space.dim())
    throw OutOfRange("rank " + std::to_string(r) + " outside [1, " + std::to_string(space.dim()) + "]");
  IndexEstimate out = operator_search(space, r, false, options, seed);
  out.kind = IndexKind::rank;
  out.rank = r;
  if (r == 1 && space.field() == Field::real && out.bounds.lower < 1.0 / std::numbers::e) {
    out.bounds.lower = 1.0 / std::numbers::e;
    out.bounds.lower_source = "rank-one index of a real space: n_1(X) >= 1/e";
  }
  return out;
}

IndexEstimate absolute_index_estimate(const SpaceDescriptor& space, const IndexOptions& options, std::uint64_t seed) {
  if (!space.is_flat() || space.dim() < 2)
    throw DegenerateInput("absolute index needs a flat l_p^m space with m >= 2");
  const Exponent p = space.flat_exponent();
  if (p.is_one() || p.is_infinite()) throw OutOfRange("absolute index needs 1 < p < inf");
  IndexEstimate out = operator_search(space, space.dim(), true, options, seed);
  out.kind = IndexKind::absolute;
  out.target = absolute_index_target(p.value());
  out.bounds.note = "absolute index of L_p: 1/(p^(1/p) q^(1/q))";
  return out;
}

IndexEstimate poly_index_estimate(const SpaceDescriptor& space, int degree, const IndexOptions& options,
                                  std::uint64_t seed) {
  if (degree < 1) throw OutOfRange("polynomial degree must be >= 1");
  check_polynomial_cap(space.dim(), degree);
  if (degree == 1) {
    IndexEstimate out = numerical_index_estimate(space, options, seed);
    out.witness = HomogeneousPolynomial::from_operator(std::get<Operator>(out.witness));
    out.kind = IndexKind::polynomial;
    out.degree = 1;
    return out;
  }

  const std::size_t n = space.dim();
  const bool complex = space.field() == Field::complex;
  std::size_t size = n;
  for (int k = 0; k < degree; ++k) size *= n;
  auto gaussian_coeffs = [size, complex](Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Scalar> c(size);
    for (auto& v : c) v = complex ? Scalar(gauss(rng), gauss(rng)) / std::sqrt(2.0) : Scalar(gauss(rng), 0.0);
    return c;
  };

  SearchProblem<std::vector<Scalar>> problem;
  if (n > 1) {
    // P(x) = (x_2^k, 0, ..., 0) and P(x) = (x_1^(k-1) x_2, 0, ..., 0).
    std::vector<Scalar> a(size), b(size);
    std::size_t ia = 0, ib = 0;
    for (int k = 0; k < degree; ++k) {
      ia = ia * n + 1;
      ib = ib * n + (k == degree - 1 ? 1 : 0);
    }
    a[ia] = 1.0;
    b[ib] = 1.0;
    problem.starts.push_back(std::move(a));
    problem.starts.push_back(std::move(b));
  }
  {
    Rng rng = make_rng(seed, {0x7073ULL});
    problem.starts.push_back(gaussian_coeffs(rng));
  }
  problem.random_start = gaussian_coeffs;
  problem.perturb = [gaussian_coeffs](const std::vector<Scalar>& c, double step, Rng& rng) {
    double scale = 1e-3;
    for (const auto& v : c) scale = std::max(scale, std::abs(v));
    std::vector<Scalar> out = gaussian_coeffs(rng);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c[i] + step * scale * out[i];
    return out;
  };
  problem.evaluate = [&space, degree](const std::vector<Scalar>& c, const RadiusOptions& ro, const NormOptions& no,
                                      std::uint64_t s) {
    HomogeneousPolynomial poly(space, degree, c);
    RadiusOptions norm_options = ro;
    norm_options.ascent.restarts = std::max(ro.ascent.restarts, no.restarts);
    Evaluation ev;
    ev.norm = poly_norm(poly, norm_options, derive_seed(s, {1}));
    ev.radius = poly_radius(poly, ro, derive_seed(s, {2}));
    if (ev.norm.value > 0.0) ev.ratio = ev.radius.value / ev.norm.value;
    return ev;
  };

  SearchResult<std::vector<Scalar>> found = min_max_search(problem, options, seed);
  const double nrm = found.evaluation.norm.value;
  std::vector<Scalar> scaled = found.best;
  for (auto& v : scaled) v /= nrm;
  HomogeneousPolynomial poly(space, degree, std::move(scaled));
  Evaluation ev = std::move(found.evaluation);
  ev.norm.value = norm(poly_apply(poly, ev.norm.witness));
  ev.radius.value = std::abs(eval(ev.radius.witness.xstar, poly_apply(poly, ev.radius.witness.x)));

  IndexEstimate out;
  out.upper_bound = ev.radius.value / ev.norm.value;
  out.radius_method = ev.radius.method;
  out.witness_radius = std::move(ev.radius);
  out.witness_norm = std::move(ev.norm);
  out.witness = std::move(poly);
  out.evaluations = found.evaluations;
  out.field = space.field();
  out.kind = IndexKind::polynomial;
  out.degree = degree;
  out.bounds.lower = 0.0;
  out.bounds.upper = 1.0;
  out.bounds.lower_source = "polynomial index lies in [0, 1]";
  out.bounds.upper_source = "polynomial index lies in [0, 1]";
  return out;
}

double recompute_ratio(const IndexEstimate& estimate, std::uint64_t seed) {
  if (const auto* t = std::get_if<Operator>(&estimate.witness)) {
    const double nrm = op_norm(*t, NormOptions{}, derive_seed(seed, {1})).value;
    const double rad = estimate.kind == IndexKind::absolute ? absolute_radius(*t, RadiusOptions{}, derive_seed(seed, {2})).value
                                                           : numerical_radius(*t, RadiusOptions{}, derive_seed(seed, {2})).value;
    return rad / nrm;
  }
  const auto& p = std::get<HomogeneousPolynomial>(estimate.witness);
  const double nrm = poly_norm(p, RadiusOptions{}, derive_seed(seed, {1})).value;
  const double rad = poly_radius(p, RadiusOptions{}, derive_seed(seed, {2})).value;
  return rad / nrm;
}

}  // namespace numidx
