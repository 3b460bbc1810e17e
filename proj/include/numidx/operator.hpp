#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "numidx/space.hpp"

namespace numidx {

/// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n) {}
  Matrix(std::size_t n, std::vector<Scalar> row_major);
  static Matrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const Scalar> data() const noexcept { return data_; }
  std::span<Scalar> data() noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Scalar> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(Scalar alpha, const Matrix& a);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix conjugate_transpose(const Matrix& a);
/// Numerical rank from a complex Gaussian elimination with relative pivot tolerance.
std::size_t matrix_rank(const Matrix& a, double rel_tol = 1e-10);

/// Linear operator on a descriptor space (domain = codomain).
class Operator {
 public:
  /// Throws DescriptorMismatch on a size mismatch and FieldMismatch when a real
  /// space receives complex entries.
  Operator(SpaceDescriptor space, Matrix matrix);
  static Operator identity(const SpaceDescriptor& space);
  static Operator zero(const SpaceDescriptor& space);

  const SpaceDescriptor& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.size(); }

 private:
  SpaceDescriptor space_;
  Matrix matrix_;
};

Vector apply(const Operator& t, const Vector& v);
/// Composition a∘b on a common space.
Operator compose(const Operator& a, const Operator& b);
Operator scale(Scalar alpha, const Operator& t);

/// Banach-space adjoint: transpose (real) or conjugate transpose (complex),
/// bound to dual_descriptor(space).
Operator adjoint(const Operator& t);

/// x -> f(x)·y.
Operator rank_one(const Functional& f, const Vector& y);

/// Norm-one projection keeping a set of top-level blocks, together with the
/// descriptor of its range (the kept block itself if one block is kept,
/// otherwise the p-sum of the kept blocks).
struct CoordinateProjection {
  Operator op;
  SpaceDescriptor range;
  std::vector<std::size_t> kept;  // flattened coordinates of the range, ascending
};

/// Throws DegenerateInput for an empty keep-set and OutOfRange for invalid indices.
CoordinateProjection coordinate_projection(const SpaceDescriptor& space, const std::vector<std::size_t>& keep);

/// L∘Q on the full space of Q, with L acting on Q's range: L is zero-padded
/// into the kept coordinates. Throws DescriptorMismatch when L is not bound to
/// Q's range.
Operator compose_with_projection(const Operator& l, const CoordinateProjection& q);

enum class NormMethod { ascent, grid, exact };

const char* to_string(NormMethod method);

struct OperatorNormEstimate {
  double value = 0.0;
  Vector witness = Vector::zero(SpaceDescriptor::scalar());
  NormMethod method = NormMethod::ascent;
  double defect = 0.0;
  long iterations = 0;
};

struct NormOptions {
  int restarts = 16;
  int max_iterations = 500;
  double tolerance = 1e-10;
};

/// Certified lower bound of the operator norm with a unit witness.
///
/// Flat l_1^m and l_inf^m use the exact column-sum / row-sum formulas; every
/// other space runs the duality-map power iteration
///   x <- J*(T^t J(T x))
/// from the coordinate axes and `restarts` random points.
OperatorNormEstimate op_norm(const Operator& t, const NormOptions& options, std::uint64_t seed);

/// ||T x|| for a unit x; the quantity reported by every norm estimate.
double norm_at(const Operator& t, const Vector& x);

/// Random operator: sum of r rank-one Gaussian terms, scaled so that the norm
/// estimate is 1. Throws OutOfRange unless 1 <= r <= dim.
Operator rank_r_sample(const SpaceDescriptor& space, std::size_t r, std::uint64_t seed,
                       const NormOptions& options = {});

/// I.i.d. standard (real or complex) normal matrix on the space, unscaled.
Operator gaussian_operator(const SpaceDescriptor& space, Rng& rng);

}  // namespace numidx
