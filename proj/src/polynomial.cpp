#include "numidx/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace numidx {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Averages coefficients over permutations of the k input indices.
void symmetrise(std::vector<Scalar>& coeffs, std::size_t n, int k) {
  if (k <= 1) return;
  const std::size_t block = ipow(n, k);
  std::vector<std::size_t> digits(static_cast<std::size_t>(k));
  std::vector<std::size_t> key_of(block);
  for (std::size_t idx = 0; idx < block; ++idx) {
    std::size_t rest = idx;
    for (int d = k - 1; d >= 0; --d) {
      digits[static_cast<std::size_t>(d)] = rest % n;
      rest /= n;
    }
    std::sort(digits.begin(), digits.end());
    std::size_t key = 0;
    for (std::size_t d : digits) key = key * n + d;
    key_of[idx] = key;
  }
  std::unordered_map<std::size_t, std::pair<Scalar, int>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    groups.clear();
    Scalar* row = coeffs.data() + i * block;
    for (std::size_t idx = 0; idx < block; ++idx) {
      auto& g = groups[key_of[idx]];
      g.first += row[idx];
      g.second += 1;
    }
    for (std::size_t idx = 0; idx < block; ++idx) {
      const auto& g = groups[key_of[idx]];
      row[idx] = g.first / static_cast<double>(g.second);
    }
  }
}

}  // namespace

void check_polynomial_cap(std::size_t dim, int degree) {
  if (degree < 1) throw OutOfRange("polynomial degree must be >= 1");
  double size = 1.0;
  for (int i = 0; i < degree; ++i) size *= static_cast<double>(dim);
  if (size > static_cast<double>(kPolynomialTensorCap))
    throw BudgetExceeded("dim^k = " + std::to_string(static_cast<long long>(size)) + " exceeds the tensor cap " +
                         std::to_string(kPolynomialTensorCap));
}

HomogeneousPolynomial::HomogeneousPolynomial(SpaceDescriptor space, int degree, std::vector<Scalar> coefficients)
    : space_(std::move(space)), degree_(degree), coeffs_(std::move(coefficients)) {
  check_polynomial_cap(space_.dim(), degree_);
  const std::size_t n = space_.dim();
  if (coeffs_.size() != n * ipow(n, degree_))
    throw DescriptorMismatch("polynomial coefficient array has " + std::to_string(coeffs_.size()) +
                             " entries, expected dim^(k+1) = " + std::to_string(n * ipow(n, degree_)));
  if (space_.field() == Field::real)
    for (const auto& c : coeffs_)
      if (c.imag() != 0.0) throw FieldMismatch("complex coefficient in a real polynomial");
  symmetrise(coeffs_, n, degree_);
}

HomogeneousPolynomial HomogeneousPolynomial::from_operator(const Operator& t) {
  const auto d = t.matrix().data();
  return HomogeneousPolynomial(t.space(), 1, std::vector<Scalar>(d.begin(), d.end()));
}

HomogeneousPolynomial HomogeneousPolynomial::zero(const SpaceDescriptor& space, int degree) {
  check_polynomial_cap(space.dim(), degree);
  return HomogeneousPolynomial(space, degree, std::vector<Scalar>(space.dim() * ipow(space.dim(), degree)));
}

void poly_apply_into(const HomogeneousPolynomial& p, std::span<const Scalar> v, std::span<Scalar> out) {
  const std::size_t n = p.dim();
  std::vector<Scalar> cur(p.coefficients().begin(), p.coefficients().end());
  std::size_t rows = cur.size() / n;
  for (int step = 0; step < p.degree(); ++step) {
    for (std::size_t a = 0; a < rows; ++a) {
      Scalar s = 0.0;
      const Scalar* row = cur.data() + a * n;
      for (std::size_t j = 0; j < n; ++j) s += row[j] * v[j];
      cur[a] = s;
    }
    cur.resize(rows);
    rows /= n;
  }
  std::copy(cur.begin(), cur.end(), out.begin());
}

Vector poly_apply(const HomogeneousPolynomial& p, const Vector& v) {
  if (p.space().field() != v.space().field()) throw FieldMismatch("poly_apply: field mismatch");
  if (!(p.space() == v.space())) throw DescriptorMismatch("poly_apply: vector bound to a different space");
  std::vector<Scalar> out(p.dim());
  poly_apply_into(p, v.coords(), out);
  return Vector(p.space(), std::move(out));
}

HomogeneousPolynomial gaussian_polynomial(const SpaceDescriptor& space, int degree, Rng& rng) {
  check_polynomial_cap(space.dim(), degree);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const bool complex = space.field() == Field::complex;
  std::vector<Scalar> c(space.dim() * ipow(space.dim(), degree));
  for (auto& v : c) {
    const double re = gauss(rng);
    v = complex ? Scalar(re, gauss(rng)) / std::sqrt(2.0) : Scalar(re, 0.0);
  }
  return HomogeneousPolynomial(space, degree, std::move(c));
}

HomogeneousPolynomial scale(Scalar alpha, const HomogeneousPolynomial& p) {
  if (p.space().field() == Field::real && alpha.imag() != 0.0) throw FieldMismatch("complex scalar on a real polynomial");
  std::vector<Scalar> c(p.coefficients().begin(), p.coefficients().end());
  for (auto& v : c) v *= alpha;
  return HomogeneousPolynomial(p.space(), p.degree(), std::move(c));
}

}  // namespace numidx
