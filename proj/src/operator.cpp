#include "numidx/operator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace numidx {

namespace {

Scalar phase_of(Scalar z) {
  const double r = std::abs(z);
  return r == 0.0 ? Scalar(1.0) : z / r;
}

void check_same_space(const Operator& a, const Operator& b, const char* what) {
  if (a.space().field() != b.space().field()) throw FieldMismatch(std::string(what) + ": operators over different fields");
  if (!(a.space() == b.space())) throw DescriptorMismatch(std::string(what) + ": operators on different spaces");
}

}  // namespace

Matrix::Matrix(std::size_t n, std::vector<Scalar> row_major) : n_(n), data_(std::move(row_major)) {
  if (data_.size() != n * n) throw DescriptorMismatch("matrix data has " + std::to_string(data_.size()) +
                                                      " entries, expected " + std::to_string(n * n));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.size() != b.size()) throw DescriptorMismatch("matrix product of different sizes");
  const std::size_t n = a.size();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Scalar aik = a(i, k);
      if (aik == Scalar(0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator*(Scalar alpha, const Matrix& a) {
  Matrix c = a;
  for (auto& v : c.data()) v *= alpha;
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.size() != b.size()) throw DescriptorMismatch("matrix sum of different sizes");
  Matrix c = a;
  for (std::size_t k = 0; k < c.data().size(); ++k) c.data()[k] += b.data()[k];
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix conjugate_transpose(const Matrix& a) {
  Matrix t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

std::size_t matrix_rank(const Matrix& a, double rel_tol) {
  Matrix m = a;
  const std::size_t n = m.size();
  double scale = 0.0;
  for (const auto& v : m.data()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0;
  const double tol = rel_tol * scale * static_cast<double>(n);
  std::size_t rank = 0;
  std::vector<bool> used(n, false);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    double best = tol;
    for (std::size_t r = 0; r < n; ++r)
      if (!used[r] && std::abs(m(r, col)) > best) {
        best = std::abs(m(r, col));
        pivot = r;
      }
    if (pivot == n) continue;
    used[pivot] = true;
    ++rank;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == pivot) continue;
      const Scalar factor = m(r, col) / m(pivot, col);
      if (factor == Scalar(0.0)) continue;
      for (std::size_t c = col; c < n; ++c) m(r, c) -= factor * m(pivot, c);
    }
  }
  return rank;
}

Operator::Operator(SpaceDescriptor space, Matrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (matrix_.size() != space_.dim())
    throw DescriptorMismatch("operator matrix is " + std::to_string(matrix_.size()) + "x" +
                             std::to_string(matrix_.size()) + ", space dimension is " + std::to_string(space_.dim()));
  if (space_.field() == Field::real)
    for (const auto& v : matrix_.data())
      if (v.imag() != 0.0) throw FieldMismatch("complex matrix entry on a real space");
}

Operator Operator::identity(const SpaceDescriptor& space) { return Operator(space, Matrix::identity(space.dim())); }

Operator Operator::zero(const SpaceDescriptor& space) { return Operator(space, Matrix(space.dim())); }

Vector apply(const Operator& t, const Vector& v) {
  if (t.space().field() != v.space().field()) throw FieldMismatch("apply: operator and vector over different fields");
  if (!(t.space() == v.space())) throw DescriptorMismatch("apply: vector bound to a different space");
  const std::size_t n = t.dim();
  std::vector<Scalar> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Scalar s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += t.matrix()(i, j) * v[j];
    out[i] = s;
  }
  return Vector(t.space(), std::move(out));
}

Operator compose(const Operator& a, const Operator& b) {
  check_same_space(a, b, "compose");
  return Operator(a.space(), a.matrix() * b.matrix());
}

Operator scale(Scalar alpha, const Operator& t) {
  if (t.space().field() == Field::real && alpha.imag() != 0.0) throw FieldMismatch("complex scalar on a real operator");
  return Operator(t.space(), alpha * t.matrix());
}

Operator adjoint(const Operator& t) {
  const Matrix m = t.space().field() == Field::real ? transpose(t.matrix()) : conjugate_transpose(t.matrix());
  return Operator(dual_descriptor(t.space()), m);
}

Operator rank_one(const Functional& f, const Vector& y) {
  if (f.space().field() != y.space().field()) throw FieldMismatch("rank_one: functional and vector over different fields");
  if (!(f.space() == y.space())) throw DescriptorMismatch("rank_one: functional and vector on different spaces");
  const std::size_t n = y.size();
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = y[i] * f[j];
  return Operator(y.space(), std::move(m));
}

CoordinateProjection coordinate_projection(const SpaceDescriptor& space, const std::vector<std::size_t>& keep) {
  if (keep.empty()) throw DegenerateInput("coordinate projection with an empty keep-set");
  if (space.is_leaf()) throw OutOfRange("a scalar space has no blocks to project on");
  const std::set<std::size_t> blocks(keep.begin(), keep.end());
  if (*blocks.rbegin() >= space.child_count())
    throw OutOfRange("block index " + std::to_string(*blocks.rbegin()) + " out of range (space has " +
                     std::to_string(space.child_count()) + " blocks)");
  Matrix m(space.dim());
  std::vector<std::size_t> kept;
  std::vector<SpaceDescriptor> kept_blocks;
  for (std::size_t b : blocks) {
    const std::size_t offset = space.child_offset(b);
    const std::size_t width = space.child(b).dim();
    for (std::size_t k = offset; k < offset + width; ++k) {
      m(k, k) = 1.0;
      kept.push_back(k);
    }
    kept_blocks.push_back(space.child(b));
  }
  SpaceDescriptor range = kept_blocks.size() == 1 ? kept_blocks.front()
                                                  : SpaceDescriptor::psum(space.exponent(), kept_blocks);
  return CoordinateProjection{Operator(space, std::move(m)), std::move(range), std::move(kept)};
}

Operator compose_with_projection(const Operator& l, const CoordinateProjection& q) {
  if (l.space().field() != q.range.field()) throw FieldMismatch("compose_with_projection: field mismatch");
  if (!(l.space() == q.range))
    throw DescriptorMismatch("compose_with_projection: operator is not bound to the projection's range");
  Matrix m(q.op.dim());
  for (std::size_t a = 0; a < q.kept.size(); ++a)
    for (std::size_t b = 0; b < q.kept.size(); ++b) m(q.kept[a], q.kept[b]) = l.matrix()(a, b);
  // Q itself is diagonal 0/1 on the kept coordinates, so padding L equals L_pad * Q.
  return Operator(q.op.space(), m * q.op.matrix());
}

const char* to_string(NormMethod method) {
  switch (method) {
    case NormMethod::ascent: return "ascent";
    case NormMethod::grid: return "grid";
    case NormMethod::exact: return "exact";
  }
  return "?";
}

double norm_at(const Operator& t, const Vector& x) { return norm(apply(t, x)); }

namespace {

struct PowerRun {
  std::vector<Scalar> x;
  double value = 0.0;
  double defect = 0.0;
  long iterations = 0;
};

void matvec(const Matrix& m, std::span<const Scalar> x, std::span<Scalar> y) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    Scalar s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
}

void matvec_transposed(const Matrix& m, std::span<const Scalar> f, std::span<Scalar> out) {
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += f[i] * m(i, j);
}

PowerRun power_iteration(const Operator& t, std::vector<Scalar> x, const NormOptions& options) {
  const SpaceNode& node = t.space().node();
  const std::size_t n = t.dim();
  std::vector<Scalar> y(n), phi(n), psi(n), next(n);
  PowerRun run;
  matvec(t.matrix(), x, y);
  run.value = kernel::norm(node, y);
  run.x = x;
  for (int it = 0; it < options.max_iterations && run.value > 0.0; ++it) {
    ++run.iterations;
    kernel::norming(node, y, phi);
    matvec_transposed(t.matrix(), phi, psi);
    if (kernel::norm(node, psi, true) == 0.0) break;
    kernel::norming(node, psi, next, true);
    const double r = kernel::norm(node, next);
    for (auto& v : next) v /= r;
    matvec(t.matrix(), next, y);
    const double value = kernel::norm(node, y);
    const double gain = value - run.value;
    if (value > run.value) {
      run.value = value;
      run.x = next;
    }
    run.defect = std::abs(gain);
    if (gain < options.tolerance) break;
  }
  return run;
}

OperatorNormEstimate exact_l1(const Operator& t) {
  const std::size_t n = t.dim();
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(t.matrix()(i, j));
    if (s > best_value) {
      best_value = s;
      best = j;
    }
  }
  Vector w = Vector::unit(t.space(), best);
  return OperatorNormEstimate{norm_at(t, w), w, NormMethod::exact, 0.0, static_cast<long>(n)};
}

OperatorNormEstimate exact_linf(const Operator& t) {
  const std::size_t n = t.dim();
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::abs(t.matrix()(i, j));
    if (s > best_value) {
      best_value = s;
      best = i;
    }
  }
  std::vector<Scalar> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = std::conj(phase_of(t.matrix()(best, j)));
  Vector w(t.space(), std::move(x));
  return OperatorNormEstimate{norm_at(t, w), w, NormMethod::exact, 0.0, static_cast<long>(n)};
}

}  // namespace

OperatorNormEstimate op_norm(const Operator& t, const NormOptions& options, std::uint64_t seed) {
  const SpaceDescriptor& space = t.space();
  if (const auto p = space.uniform_exponent()) {
    if (p->is_one()) return exact_l1(t);
    if (p->is_infinite()) return exact_linf(t);
  }
  const std::size_t n = t.dim();
  PowerRun best;
  best.value = -1.0;
  long iterations = 0;
  auto consider = [&](PowerRun run) {
    iterations += run.iterations;
    if (run.value > best.value) best = std::move(run);
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Scalar> e(n);
    e[i] = 1.0 / kernel::norm(space.node(), Vector::unit(space, i).coords());
    consider(power_iteration(t, std::move(e), options));
  }
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng = make_rng(seed, {0x6f70ULL, static_cast<std::uint64_t>(r)});
    Vector start = unit_sphere_sample(space, rng);
    consider(power_iteration(t, {start.coords().begin(), start.coords().end()}, options));
  }
  Vector witness(space, std::move(best.x));
  const double value = norm_at(t, witness);
  return OperatorNormEstimate{value, std::move(witness), NormMethod::ascent, best.defect, iterations};
}

Operator gaussian_operator(const SpaceDescriptor& space, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = space.dim();
  Matrix m(n);
  const bool complex = space.field() == Field::complex;
  for (auto& v : m.data()) {
    const double re = gauss(rng);
    const double im = complex ? gauss(rng) : 0.0;
    v = complex ? Scalar(re, im) / std::sqrt(2.0) : Scalar(re, 0.0);
  }
  return Operator(space, std::move(m));
}

Operator rank_r_sample(const SpaceDescriptor& space, std::size_t r, std::uint64_t seed, const NormOptions& options) {
  if (r < 1 || r > space.dim())
    throw OutOfRange("rank " + std::to_string(r) + " outside [1, " + std::to_string(space.dim()) + "]");
  Rng rng = make_rng(seed, {0x726bULL});
  std::normal_distribution<double> gauss(0.0, 1.0);
  const bool complex = space.field() == Field::complex;
  auto draw = [&]() { return complex ? Scalar(gauss(rng), gauss(rng)) : Scalar(gauss(rng), 0.0); };
  const std::size_t n = space.dim();
  Matrix m(n);
  for (std::size_t k = 0; k < r; ++k) {
    std::vector<Scalar> y(n), f(n);
    for (auto& v : y) v = draw();
    for (auto& v : f) v = draw();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) += y[i] * f[j];
  }
  Operator t(space, std::move(m));
  const double nrm = op_norm(t, options, derive_seed(seed, {0x6e6fULL})).value;
  if (nrm == 0.0) return t;
  return scale(1.0 / nrm, t);
}

}  // namespace numidx
