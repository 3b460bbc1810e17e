#pragma once

#include <cstdint>
#include <vector>

#include "numidx/operator.hpp"

namespace numidx {

/// Largest admissible dim^degree for dense symmetric coefficient tensors.
inline constexpr std::size_t kPolynomialTensorCap = 100000;

/// k-homogeneous polynomial P(x) = A(x, ..., x) stored as a dense coefficient
/// array A[i][j1]...[jk], symmetric in (j1, ..., jk). Output index first.
class HomogeneousPolynomial {
 public:
  /// Symmetrises `coefficients` (length dim^(k+1)) over the input indices.
  /// Throws BudgetExceeded when dim^k exceeds kPolynomialTensorCap.
  HomogeneousPolynomial(SpaceDescriptor space, int degree, std::vector<Scalar> coefficients);
  static HomogeneousPolynomial from_operator(const Operator& t);
  static HomogeneousPolynomial zero(const SpaceDescriptor& space, int degree);

  const SpaceDescriptor& space() const noexcept { return space_; }
  int degree() const noexcept { return degree_; }
  std::size_t dim() const noexcept { return space_.dim(); }
  std::span<const Scalar> coefficients() const noexcept { return coeffs_; }

 private:
  SpaceDescriptor space_;
  int degree_;
  std::vector<Scalar> coeffs_;
};

/// Contracts the tensor with k copies of v.
Vector poly_apply(const HomogeneousPolynomial& p, const Vector& v);

/// Span version without checks; `out` receives dim entries.
void poly_apply_into(const HomogeneousPolynomial& p, std::span<const Scalar> v, std::span<Scalar> out);

/// Random polynomial with i.i.d. Gaussian coefficients (before symmetrisation).
HomogeneousPolynomial gaussian_polynomial(const SpaceDescriptor& space, int degree, Rng& rng);

HomogeneousPolynomial scale(Scalar alpha, const HomogeneousPolynomial& p);

/// Throws BudgetExceeded when dim^degree exceeds the tensor cap.
void check_polynomial_cap(std::size_t dim, int degree);

}  // namespace numidx
