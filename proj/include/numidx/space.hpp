#pragma once

// Finite-dimensional Banach spaces built as nested p-sums of scalar leaves.
//
// Coordinates of every vector, functional and matrix follow the depth-first,
// left-to-right order of the leaves of the descriptor tree.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "numidx/errors.hpp"
#include "numidx/random.hpp"

namespace numidx {

using Scalar = std::complex<double>;

enum class Field { real, complex };

std::string to_string(Field field);

/// Tolerance used for exact algebraic identities (norming pairs, Hölder, ...).
inline constexpr double kIdentityTolerance = 1e-9;

/// Exponent p in [1, inf] stored together with its Hölder conjugate, so that
/// conjugation is an exact involution and 1 <-> inf never goes through p/(p-1).
class Exponent {
 public:
  /// Throws OutOfRange unless 1 <= p (p may be +inf).
  static Exponent of(double p);
  static Exponent infinity() { return Exponent(kInf, 1.0); }
  static Exponent one() { return Exponent(1.0, kInf); }

  double value() const noexcept { return p_; }
  double conjugate_value() const noexcept { return q_; }
  bool is_infinite() const noexcept { return p_ == kInf; }
  bool is_one() const noexcept { return p_ == 1.0; }
  /// True for 1 < p < inf, where the norm is differentiable away from zero.
  bool is_smooth() const noexcept { return p_ > 1.0 && p_ != kInf; }

  Exponent conjugate() const noexcept { return Exponent(q_, p_); }

  friend bool operator==(const Exponent& a, const Exponent& b) noexcept { return a.p_ == b.p_; }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  Exponent(double p, double q) : p_(p), q_(q) {}
  double p_;
  double q_;
};

/// One node of a descriptor tree. Immutable once built; shared between descriptors.
struct SpaceNode {
  bool leaf = true;
  Exponent exponent = Exponent::one();  // unused for leaves
  std::vector<std::shared_ptr<const SpaceNode>> children;
  std::size_t dim = 1;
};

class SpaceDescriptor {
 public:
  static SpaceDescriptor scalar(Field field = Field::real);
  /// l_p^m: a p-sum of `dim` scalar leaves.
  static SpaceDescriptor lp(Exponent p, std::size_t dim, Field field = Field::real);
  /// p-sum of the given children. All children must share one field.
  static SpaceDescriptor psum(Exponent p, const std::vector<SpaceDescriptor>& children);

  std::size_t dim() const noexcept { return root_->dim; }
  Field field() const noexcept { return field_; }
  bool is_leaf() const noexcept { return root_->leaf; }
  /// Exponent of the root p-sum. Throws DegenerateInput on a leaf.
  Exponent exponent() const;
  std::size_t child_count() const noexcept { return root_->children.size(); }
  SpaceDescriptor child(std::size_t i) const;
  /// Offset of the first leaf of top-level child `i` in the flattened order.
  std::size_t child_offset(std::size_t i) const;

  /// Same tree with another field tag.
  SpaceDescriptor with_field(Field field) const { return SpaceDescriptor(root_, field); }

  /// A root p-sum whose children are all leaves (l_p^m). A lone leaf counts
  /// as flat with exponent 1.
  bool is_flat() const noexcept;
  /// Exponent of a flat descriptor (1 for a lone leaf).
  Exponent flat_exponent() const;
  /// The common exponent when every p-sum node carries the same one (such a
  /// tree is isometric to the flat l_p^m); 1 for a lone leaf.
  std::optional<Exponent> uniform_exponent() const;
  /// True when every p-sum node has 1 < p < inf.
  bool all_smooth() const noexcept;

  const SpaceNode& node() const noexcept { return *root_; }

  /// Structural equality: same tree shape, exponents and field.
  friend bool operator==(const SpaceDescriptor& a, const SpaceDescriptor& b);

 private:
  SpaceDescriptor(std::shared_ptr<const SpaceNode> root, Field field)
      : root_(std::move(root)), field_(field) {}
  std::shared_ptr<const SpaceNode> root_;
  Field field_;
};

/// Same tree shape with every exponent replaced by its conjugate. Involutive.
SpaceDescriptor dual_descriptor(const SpaceDescriptor& space);

/// Element of the space: coordinates in leaf order.
class Vector {
 public:
  /// Throws DescriptorMismatch on a length mismatch and FieldMismatch when a
  /// real space receives a coordinate with nonzero imaginary part.
  Vector(SpaceDescriptor space, std::vector<Scalar> coords);
  static Vector zero(const SpaceDescriptor& space);
  static Vector unit(const SpaceDescriptor& space, std::size_t i);

  const SpaceDescriptor& space() const noexcept { return space_; }
  std::span<const Scalar> coords() const noexcept { return coords_; }
  std::size_t size() const noexcept { return coords_.size(); }
  const Scalar& operator[](std::size_t i) const { return coords_[i]; }

 private:
  SpaceDescriptor space_;
  std::vector<Scalar> coords_;
};

/// Element of the dual space. `space()` is the PRIMAL descriptor; the dual
/// norm is evaluated through dual_descriptor(space()).
class Functional {
 public:
  Functional(SpaceDescriptor space, std::vector<Scalar> coords);
  static Functional zero(const SpaceDescriptor& space);

  const SpaceDescriptor& space() const noexcept { return space_; }
  std::span<const Scalar> coords() const noexcept { return coords_; }
  std::size_t size() const noexcept { return coords_.size(); }
  const Scalar& operator[](std::size_t i) const { return coords_[i]; }

 private:
  SpaceDescriptor space_;
  std::vector<Scalar> coords_;
};

/// Element of Pi(X): unit vector, unit functional, functional(vector) = 1.
/// `slack` is the largest of the three defects.
struct NormingPair {
  Vector x = Vector::zero(SpaceDescriptor::scalar());
  Functional xstar = Functional::zero(SpaceDescriptor::scalar());
  double slack = 0.0;
};

double norm(const Vector& v);
double dual_norm(const Functional& f);

/// Bilinear pairing sum_i f_i v_i (no conjugation).
Scalar eval(const Functional& f, const Vector& v);

/// Unit functional f with f(x) = ||x||. Throws DegenerateInput for x = 0.
///
/// Selection at non-smooth points: inside a 1-sum, blocks of zero norm get the
/// zero functional; inside an inf-sum, the first block of maximal norm carries
/// all the weight.
Functional norming_functional(const Vector& x);

/// Builds the norming pair (x/||x||, J(x/||x||)) and records its defect.
NormingPair make_norming_pair(const Vector& x);

/// Random point of the unit sphere. Coordinates are drawn from a continuous
/// (Gaussian) law before normalisation, so almost surely none is zero.
Vector unit_sphere_sample(const SpaceDescriptor& space, Rng& rng);

namespace kernel {

// Span-level routines used by the optimisation engines. `node` and the span
// lengths must agree; no checks are made. With `conjugate` set, every exponent
// of the tree is read as its conjugate, i.e. the routine works in the dual.

double norm(const SpaceNode& node, std::span<const Scalar> x, bool conjugate = false);

/// Writes the canonical norming functional of x into `out` (all zeros if x = 0).
/// In conjugate mode this yields a unit vector attaining the dual norm of x.
void norming(const SpaceNode& node, std::span<const Scalar> x, std::span<Scalar> out,
             bool conjugate = false);

Scalar pairing(std::span<const Scalar> f, std::span<const Scalar> x);

}  // namespace kernel

}  // namespace numidx
