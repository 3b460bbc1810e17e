#include "numidx/sphere_search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace numidx {

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kInitialStep = 0.25;

// Objective in real parameter space. Parameters are the real parts (real
// field) or interleaved real/imaginary parts (complex field) of the active
// coordinates; inactive coordinates are held at zero.
class ParamObjective {
 public:
  ParamObjective(const SpaceDescriptor& space, const SphereObjective& f)
      : node_(space.node()), complex_(space.field() == Field::complex), n_(space.dim()), f_(f), y_(n_) {}

  std::size_t width() const { return complex_ ? 2 : 1; }
  std::size_t n() const { return n_; }

  // Returns -inf when theta maps to the zero vector.
  double operator()(std::span<const double> theta, std::span<const std::size_t> active) {
    to_point(theta, active, y_);
    const double r = kernel::norm(node_, y_);
    if (r == 0.0 || !std::isfinite(r)) return -std::numeric_limits<double>::infinity();
    for (auto& v : y_) v /= r;
    ++evaluations;
    return f_(y_);
  }

  void to_point(std::span<const double> theta, std::span<const std::size_t> active, std::vector<Scalar>& y) const {
    std::fill(y.begin(), y.end(), Scalar(0.0));
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t i = active[a];
      y[i] = complex_ ? Scalar(theta[2 * a], theta[2 * a + 1]) : Scalar(theta[a], 0.0);
    }
  }

  std::vector<Scalar> unit_point(std::span<const double> theta, std::span<const std::size_t> active) const {
    std::vector<Scalar> y(n_);
    to_point(theta, active, y);
    const double r = kernel::norm(node_, y);
    for (auto& v : y) v /= r;
    return y;
  }

  std::vector<double> to_theta(std::span<const Scalar> x, std::span<const std::size_t> active) const {
    std::vector<double> theta;
    for (std::size_t i : active) {
      theta.push_back(x[i].real());
      if (complex_) theta.push_back(x[i].imag());
    }
    return theta;
  }

  long evaluations = 0;

 private:
  const SpaceNode& node_;
  bool complex_;
  std::size_t n_;
  const SphereObjective& f_;
  std::vector<Scalar> y_;
};

void normalize_euclid(std::vector<double>& theta) {
  double s = 0.0;
  for (double v : theta) s += v * v;
  s = std::sqrt(s);
  if (s > 0.0)
    for (double& v : theta) v /= s;
}

struct LocalResult {
  std::vector<double> theta;
  double value;
};

LocalResult local_ascent(ParamObjective& f, std::vector<double> theta, std::span<const std::size_t> active,
                         const AscentOptions& options) {
  normalize_euclid(theta);
  double value = f(theta, active);
  const std::size_t dim = theta.size();
  std::vector<double> grad(dim), trial(dim), probe(dim);
  double step = kInitialStep;
  int stall = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    probe = theta;
    double gnorm = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      probe[k] = theta[k] + kFdStep;
      const double up = f(probe, active);
      probe[k] = theta[k] - kFdStep;
      const double down = f(probe, active);
      probe[k] = theta[k];
      grad[k] = (up - down) / (2.0 * kFdStep);
      if (!std::isfinite(grad[k])) grad[k] = 0.0;
      gnorm += grad[k] * grad[k];
    }
    gnorm = std::sqrt(gnorm);
    if (gnorm == 0.0) break;

    bool moved = false;
    double gain = 0.0;
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t k = 0; k < dim; ++k) trial[k] = theta[k] + step * grad[k] / gnorm;
      normalize_euclid(trial);
      const double v = f(trial, active);
      if (v > value) {
        gain = v - value;
        value = v;
        theta.swap(trial);
        moved = true;
        break;
      }
      step *= options.backtrack;
    }
    if (!moved) break;
    step = std::min(2.0 * step, 1.0);
    stall = gain < options.tolerance ? stall + 1 : 0;
    if (stall >= options.stall_iterations) break;
  }
  return {std::move(theta), value};
}

// Pins coordinates that the ascent drove towards zero and re-optimises on the
// remaining support. Cusps of |t|^(p-1) at t = 0 (p < 2) are reached exactly
// this way instead of being approached at a sublinear rate.
SphereMaximum snap_and_polish(ParamObjective& f, std::vector<Scalar> x, double value, const AscentOptions& options) {
  const std::size_t n = f.n();
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;

  while (active.size() > 1) {
    double largest = 0.0;
    for (std::size_t i : active) largest = std::max(largest, std::abs(x[i]));
    std::size_t smallest = active.front();
    for (std::size_t i : active)
      if (std::abs(x[i]) < std::abs(x[smallest])) smallest = i;
    if (std::abs(x[smallest]) > options.snap_threshold * largest) break;

    std::vector<std::size_t> reduced;
    for (std::size_t i : active)
      if (i != smallest) reduced.push_back(i);
    LocalResult r = local_ascent(f, f.to_theta(x, reduced), reduced, options);
    if (!(r.value >= value)) break;
    value = r.value;
    x = f.unit_point(r.theta, reduced);
    active = std::move(reduced);
  }
  return SphereMaximum{std::move(x), value, 0};
}

}  // namespace

SphereMaximum maximize_on_sphere(const SpaceDescriptor& space, const SphereObjective& objective,
                                 const AscentOptions& options, std::uint64_t seed) {
  const std::size_t n = space.dim();
  ParamObjective f(space, objective);
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  SphereMaximum best;
  best.value = -std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<Scalar> x, double value) {
    if (value > best.value) {
      best.value = value;
      best.x = std::move(x);
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Scalar> e(n);
    e[i] = 1.0;
    const double v = objective(e);
    ++f.evaluations;
    consider(std::move(e), v);
  }

  for (int r = 0; r < options.restarts; ++r) {
    Rng rng = make_rng(seed, {0x7370ULL, static_cast<std::uint64_t>(r)});
    const Vector start = unit_sphere_sample(space, rng);
    LocalResult local = local_ascent(f, f.to_theta(start.coords(), all), all, options);
    std::vector<Scalar> x = f.unit_point(local.theta, all);
    SphereMaximum polished = snap_and_polish(f, std::move(x), local.value, options);
    consider(std::move(polished.x), polished.value);
  }

  // Re-evaluate at the returned point so the value is exactly reproducible.
  best.value = objective(best.x);
  best.evaluations = f.evaluations + 1;
  return best;
}

void check_grid_dimension(const SpaceDescriptor& space) {
  const std::size_t limit = space.field() == Field::real ? 3 : 2;
  if (space.dim() > limit)
    throw BudgetExceeded("grid oracle supports " + to_string(space.field()) + " dimension <= " +
                         std::to_string(limit) + ", got " + std::to_string(space.dim()));
}

void for_each_grid_point(const SpaceDescriptor& space, int resolution,
                         const std::function<void(std::span<const Scalar>)>& visit) {
  check_grid_dimension(space);
  if (resolution < 4) throw OutOfRange("grid resolution must be >= 4");
  const std::size_t n = space.dim();
  const bool complex = space.field() == Field::complex;
  const double pi = std::numbers::pi;
  const int half = resolution / 2;
  std::vector<Scalar> u(n);

  auto clean = [](double v) { return std::abs(v) < 1e-15 ? 0.0 : v; };
  auto emit = [&]() {
    for (auto& c : u) c = Scalar(clean(c.real()), clean(c.imag()));
    const double r = kernel::norm(space.node(), u);
    for (auto& c : u) c /= r;
    visit(u);
  };

  if (n == 1) {
    u[0] = 1.0;
    emit();
    return;
  }
  if (const auto p = space.uniform_exponent(); !complex && p && p->is_infinite()) {
    // The l_inf sphere is the surface of a cube; sweep its faces x_i = 1 so
    // that the vertices, where the maxima sit, are grid points.
    std::vector<int> k(n - 1, 0);
    while (true) {
      for (std::size_t face = 0; face < n; ++face) {
        for (std::size_t j = 0, c = 0; j < n; ++j)
          u[j] = j == face ? 1.0 : static_cast<double>(2 * k[c++] - resolution) / resolution;
        visit(u);
      }
      std::size_t d = 0;
      while (d < k.size() && ++k[d] > resolution) k[d++] = 0;
      if (d == k.size()) break;
    }
    return;
  }
  if (!complex && n == 2) {
    for (int k = 0; k < resolution; ++k) {
      const double t = k * pi / resolution;
      u[0] = std::cos(t);
      u[1] = std::sin(t);
      emit();
    }
    return;
  }
  if (!complex && n == 3) {
    u = {0.0, 0.0, 1.0};
    emit();
    for (int a = 1; a <= half; ++a) {
      const double theta = a * pi / resolution;
      for (int b = 0; b < 2 * resolution; ++b) {
        const double phi = b * pi / resolution;
        u[0] = std::sin(theta) * std::cos(phi);
        u[1] = std::sin(theta) * std::sin(phi);
        u[2] = std::cos(theta);
        emit();
      }
    }
    return;
  }
  // complex, n == 2: (cos a, sin a e^{i phi})
  u = {1.0, 0.0};
  emit();
  for (int a = 1; a < half; ++a) {
    const double alpha = a * pi / resolution;
    for (int b = 0; b < 2 * resolution; ++b) {
      const double phi = b * pi / resolution;
      u[0] = std::cos(alpha);
      u[1] = std::sin(alpha) * Scalar(std::cos(phi), std::sin(phi));
      emit();
    }
  }
  u = {0.0, 1.0};
  emit();
}

}  // namespace numidx
