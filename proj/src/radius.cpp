#include "numidx/radius.hpp"

#include <algorithm>
#include <cmath>

namespace numidx {

namespace {

Scalar phase_of(Scalar z) {
  const double r = std::abs(z);
  return r == 0.0 ? Scalar(1.0) : z / r;
}

void matvec(const Matrix& m, std::span<const Scalar> x, std::span<Scalar> y) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    Scalar s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
}

// |J(x)(T x)| with reusable scratch space.
class RadiusKernel {
 public:
  explicit RadiusKernel(const Operator& t) : t_(t), f_(t.dim()), y_(t.dim()) {}
  double operator()(std::span<const Scalar> x) {
    kernel::norming(t_.space().node(), x, f_);
    matvec(t_.matrix(), x, y_);
    return std::abs(kernel::pairing(f_, y_));
  }

 private:
  const Operator& t_;
  std::vector<Scalar> f_, y_;
};

class AbsoluteKernel {
 public:
  explicit AbsoluteKernel(const Operator& t) : t_(t), p_(t.space().flat_exponent().value()), y_(t.dim()) {}
  double operator()(std::span<const Scalar> x) {
    matvec(t_.matrix(), x, y_);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = p_ == 2.0 ? std::abs(x[i]) : std::pow(std::abs(x[i]), p_ - 1.0);
      s += w * std::abs(y_[i]);
    }
    return s;
  }

 private:
  const Operator& t_;
  double p_;
  std::vector<Scalar> y_;
};

class PolyKernel {
 public:
  explicit PolyKernel(const HomogeneousPolynomial& p) : p_(p), f_(p.dim()), y_(p.dim()) {}
  double radius(std::span<const Scalar> x) {
    kernel::norming(p_.space().node(), x, f_);
    poly_apply_into(p_, x, y_);
    return std::abs(kernel::pairing(f_, y_));
  }
  double norm(std::span<const Scalar> x) {
    poly_apply_into(p_, x, y_);
    return kernel::norm(p_.space().node(), y_);
  }

 private:
  const HomogeneousPolynomial& p_;
  std::vector<Scalar> f_, y_;
};

NormingPair pair_at(const SpaceDescriptor& space, std::span<const Scalar> x) {
  return make_norming_pair(Vector(space, std::vector<Scalar>(x.begin(), x.end())));
}

NormingPair explicit_pair(Vector x, Functional f) {
  const double slack = std::max({std::abs(norm(x) - 1.0), std::abs(dual_norm(f) - 1.0),
                                 std::abs(eval(f, x) - Scalar(1.0))});
  return NormingPair{std::move(x), std::move(f), slack};
}

double certified_value(const Operator& t, const NormingPair& w) { return std::abs(eval(w.xstar, apply(t, w.x))); }

RadiusEstimate ascent_impl(const Operator& t, const AscentOptions& options, std::uint64_t seed) {
  RadiusKernel k(t);
  SphereMaximum m = maximize_on_sphere(
      t.space(), [&k](std::span<const Scalar> x) { return k(x); }, options, derive_seed(seed, {0x7261ULL}));
  RadiusEstimate e;
  e.witness = pair_at(t.space(), m.x);
  e.value = certified_value(t, e.witness);
  e.method = RadiusMethod::ascent;
  e.guarantee = Guarantee::certified_lower_bound;
  e.work = m.evaluations;
  return e;
}

bool flat_kink(const SpaceDescriptor& space) {
  const auto p = space.uniform_exponent();
  return p && (p->is_one() || p->is_infinite());
}

// Extreme norming functionals at x on flat real l_1 / l_inf; canonical otherwise.
template <typename Visit>
void for_each_face_functional(const SpaceDescriptor& space, std::span<const Scalar> x, std::vector<Scalar>& f,
                              Visit&& visit) {
  const std::size_t n = x.size();
  if (space.field() == Field::real && n > 1 && flat_kink(space)) {
    if (space.uniform_exponent()->is_one()) {
      std::vector<std::size_t> zeros;
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == Scalar(0.0)) {
          zeros.push_back(i);
          f[i] = 0.0;
        } else {
          f[i] = x[i].real() > 0 ? 1.0 : -1.0;
        }
      }
      const std::size_t patterns = std::size_t{1} << zeros.size();
      for (std::size_t mask = 0; mask < patterns; ++mask) {
        for (std::size_t b = 0; b < zeros.size(); ++b) f[zeros[b]] = (mask >> b) & 1U ? -1.0 : 1.0;
        visit(f);
      }
      return;
    }
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) top = std::max(top, std::abs(x[i]));
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(x[i]) < top * (1.0 - 1e-12)) continue;
      std::fill(f.begin(), f.end(), Scalar(0.0));
      f[i] = x[i].real() > 0 ? 1.0 : -1.0;
      visit(f);
    }
    return;
  }
  kernel::norming(space.node(), x, f);
  visit(f);
}

}  // namespace

const char* to_string(RadiusMethod method) {
  switch (method) {
    case RadiusMethod::automatic: return "auto";
    case RadiusMethod::ascent: return "ascent";
    case RadiusMethod::enumerate: return "enumerate";
    case RadiusMethod::grid: return "grid";
  }
  return "?";
}

const char* to_string(Guarantee guarantee) {
  return guarantee == Guarantee::exact_enumeration ? "exact-enumeration" : "certified-lower-bound";
}

RadiusMethod parse_radius_method(const std::string& text) {
  if (text == "auto") return RadiusMethod::automatic;
  if (text == "ascent") return RadiusMethod::ascent;
  if (text == "enumerate") return RadiusMethod::enumerate;
  if (text == "grid") return RadiusMethod::grid;
  throw ParseError("method", "expected auto|ascent|enumerate|grid, got '" + text + "'");
}

double radius_objective(const Operator& t, std::span<const Scalar> x) {
  RadiusKernel k(t);
  return k(x);
}

double absolute_objective(const Operator& t, std::span<const Scalar> x) {
  AbsoluteKernel k(t);
  return k(x);
}

RadiusEstimate radius_ascent(const Operator& t, const AscentOptions& options, std::uint64_t seed) {
  if (!t.space().all_smooth())
    throw OutOfRange("ascent backend needs every exponent in (1, inf); use enumerate or auto");
  return ascent_impl(t, options, seed);
}

RadiusEstimate radius_enumerate(const Operator& t) {
  const SpaceDescriptor& space = t.space();
  if (!flat_kink(space)) throw DegenerateInput("enumeration backend needs an l_1^m or l_inf^m space (flat or uniformly nested)");
  const std::size_t n = t.dim();
  const Matrix& m = t.matrix();
  const bool l1 = space.uniform_exponent()->is_one();

  RadiusEstimate best;
  best.value = -1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<Scalar> x(n), f(n);
    const Scalar omega = phase_of(m(c, c));
    if (l1) {
      // Extreme point e_c; its face of norming functionals is {f : f_c = 1, |f_i| <= 1}.
      x[c] = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        f[i] = i == c ? Scalar(1.0) : (m(i, c) == Scalar(0.0) ? Scalar(0.0) : omega * std::conj(phase_of(m(i, c))));
    } else {
      // Face {x : x_c = 1, |x_j| <= 1} normed by e_c; its extreme points are the phase vectors.
      f[c] = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        x[j] = j == c ? Scalar(1.0) : (m(c, j) == Scalar(0.0) ? Scalar(0.0) : omega * std::conj(phase_of(m(c, j))));
    }
    NormingPair w = explicit_pair(Vector(space, std::move(x)), Functional(space, std::move(f)));
    const double v = certified_value(t, w);
    if (v > best.value) {
      best.value = v;
      best.witness = std::move(w);
    }
  }
  best.method = RadiusMethod::enumerate;
  best.guarantee = Guarantee::exact_enumeration;
  best.work = static_cast<long>(n);
  return best;
}

RadiusEstimate radius_grid_oracle(const Operator& t, int resolution) {
  const SpaceDescriptor& space = t.space();
  const std::size_t n = t.dim();
  std::vector<Scalar> y(n), f(n), best_x, best_f;
  double best = -1.0;
  long samples = 0;
  for_each_grid_point(space, resolution, [&](std::span<const Scalar> x) {
    ++samples;
    matvec(t.matrix(), x, y);
    for_each_face_functional(space, x, f, [&](const std::vector<Scalar>& g) {
      const double v = std::abs(kernel::pairing(g, y));
      if (v > best) {
        best = v;
        best_x.assign(x.begin(), x.end());
        best_f = g;
      }
    });
  });
  RadiusEstimate e;
  e.witness = explicit_pair(Vector(space, best_x), Functional(space, best_f));
  e.value = certified_value(t, e.witness);
  e.method = RadiusMethod::grid;
  e.guarantee = Guarantee::certified_lower_bound;
  e.work = samples;
  return e;
}

RadiusEstimate numerical_radius(const Operator& t, const RadiusOptions& options, std::uint64_t seed) {
  switch (options.method) {
    case RadiusMethod::grid: return radius_grid_oracle(t, options.resolution);
    case RadiusMethod::enumerate: return radius_enumerate(t);
    case RadiusMethod::ascent: return radius_ascent(t, options.ascent, seed);
    case RadiusMethod::automatic: break;
  }
  if (flat_kink(t.space())) return radius_enumerate(t);
  return ascent_impl(t, options.ascent, seed);
}

RadiusEstimate absolute_radius(const Operator& t, const RadiusOptions& options, std::uint64_t seed) {
  const SpaceDescriptor& space = t.space();
  if (!space.is_flat() || space.flat_exponent().is_infinite())
    throw DegenerateInput("absolute numerical radius needs a flat l_p^m space with 1 <= p < inf");
  AbsoluteKernel k(t);
  std::vector<Scalar> best_x;
  long work = 0;
  if (options.method == RadiusMethod::grid) {
    double best = -1.0;
    for_each_grid_point(space, options.resolution, [&](std::span<const Scalar> x) {
      ++work;
      const double v = k(x);
      if (v > best) {
        best = v;
        best_x.assign(x.begin(), x.end());
      }
    });
  } else if (options.method == RadiusMethod::enumerate) {
    throw DegenerateInput("absolute numerical radius has no enumeration backend");
  } else {
    SphereMaximum m = maximize_on_sphere(
        space, [&k](std::span<const Scalar> x) { return k(x); }, options.ascent, derive_seed(seed, {0x6162ULL}));
    best_x = std::move(m.x);
    work = m.evaluations;
  }
  RadiusEstimate e;
  e.witness = pair_at(space, best_x);
  e.value = k(e.witness.x.coords());
  e.method = options.method == RadiusMethod::grid ? RadiusMethod::grid : RadiusMethod::ascent;
  e.guarantee = Guarantee::certified_lower_bound;
  e.work = work;
  return e;
}

RadiusEstimate poly_radius(const HomogeneousPolynomial& p, const RadiusOptions& options, std::uint64_t seed) {
  const SpaceDescriptor& space = p.space();
  if (p.degree() == 1) {
    const auto c = p.coefficients();
    return numerical_radius(Operator(space, Matrix(p.dim(), {c.begin(), c.end()})), options, seed);
  }
  if (options.method == RadiusMethod::enumerate) throw DegenerateInput("polynomial radius has no enumeration backend");
  if (options.method == RadiusMethod::ascent && !space.all_smooth())
    throw OutOfRange("ascent backend needs every exponent in (1, inf)");
  PolyKernel k(p);
  std::vector<Scalar> best_x;
  long work = 0;
  if (options.method == RadiusMethod::grid) {
    double best = -1.0;
    for_each_grid_point(space, options.resolution, [&](std::span<const Scalar> x) {
      ++work;
      const double v = k.radius(x);
      if (v > best) {
        best = v;
        best_x.assign(x.begin(), x.end());
      }
    });
  } else {
    SphereMaximum m = maximize_on_sphere(
        space, [&k](std::span<const Scalar> x) { return k.radius(x); }, options.ascent,
        derive_seed(seed, {0x7261ULL}));
    best_x = std::move(m.x);
    work = m.evaluations;
  }
  RadiusEstimate e;
  e.witness = pair_at(space, best_x);
  e.value = std::abs(eval(e.witness.xstar, poly_apply(p, e.witness.x)));
  e.method = options.method == RadiusMethod::grid ? RadiusMethod::grid : RadiusMethod::ascent;
  e.guarantee = Guarantee::certified_lower_bound;
  e.work = work;
  return e;
}

OperatorNormEstimate poly_norm(const HomogeneousPolynomial& p, const RadiusOptions& options, std::uint64_t seed) {
  const SpaceDescriptor& space = p.space();
  if (p.degree() == 1) {
    const auto c = p.coefficients();
    NormOptions no;
    no.restarts = std::max(1, options.ascent.restarts / 4);
    return op_norm(Operator(space, Matrix(p.dim(), {c.begin(), c.end()})), no, seed);
  }
  PolyKernel k(p);
  std::vector<Scalar> best_x;
  long work = 0;
  NormMethod method = NormMethod::ascent;
  if (options.method == RadiusMethod::grid) {
    method = NormMethod::grid;
    double best = -1.0;
    for_each_grid_point(space, options.resolution, [&](std::span<const Scalar> x) {
      ++work;
      const double v = k.norm(x);
      if (v > best) {
        best = v;
        best_x.assign(x.begin(), x.end());
      }
    });
  } else {
    SphereMaximum m = maximize_on_sphere(
        space, [&k](std::span<const Scalar> x) { return k.norm(x); }, options.ascent, derive_seed(seed, {0x706eULL}));
    best_x = std::move(m.x);
    work = m.evaluations;
  }
  Vector w(space, std::move(best_x));
  const double value = norm(poly_apply(p, w));
  return OperatorNormEstimate{value, std::move(w), method, 0.0, work};
}

EnumerationPretest enumeration_pretest(int cases, int resolution, std::uint64_t seed, double tolerance) {
  EnumerationPretest result;
  int index = 0;
  for (const Exponent p : {Exponent::one(), Exponent::infinity()}) {
    for (std::size_t m : {std::size_t{2}, std::size_t{3}}) {
      const SpaceDescriptor space = SpaceDescriptor::lp(p, m);
      for (int c = 0; c < cases; ++c, ++index) {
        Rng rng = make_rng(seed, {0x7074ULL, static_cast<std::uint64_t>(index)});
        const Operator t = gaussian_operator(space, rng);
        const double exact = radius_enumerate(t).value;
        const double swept = radius_grid_oracle(t, resolution).value;
        const double gap = std::abs(exact - swept);
        if (gap > result.max_gap) result.max_gap = gap;
        if (gap > tolerance && result.passed) {
          result.passed = false;
          result.diagnostic = "enumeration disagrees with grid oracle on l_" +
                              std::string(p.is_one() ? "1" : "inf") + "^" + std::to_string(m) + " case " +
                              std::to_string(c) + ": enumerate=" + std::to_string(exact) +
                              " grid=" + std::to_string(swept);
        }
      }
    }
  }
  return result;
}

}  // namespace numidx
