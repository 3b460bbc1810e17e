#include "numidx/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace numidx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double effective_p(const SpaceNode& node, bool conjugate) {
  return conjugate ? node.exponent.conjugate_value() : node.exponent.value();
}

// p-combination of nonnegative block norms, rescaled to avoid overflow.
class PAccumulator {
 public:
  explicit PAccumulator(double p) : p_(p) {}
  void add(double r) {
    if (p_ == kInf) {
      scale_ = std::max(scale_, r);
      return;
    }
    if (p_ == 1.0) {
      sum_ += r;
      return;
    }
    if (r == 0.0) return;
    if (r > scale_) {
      ssq_ = 1.0 + ssq_ * power(scale_ / r);
      scale_ = r;
    } else {
      ssq_ += power(r / scale_);
    }
  }
  double result() const {
    if (p_ == kInf) return scale_;
    if (p_ == 1.0) return sum_;
    if (scale_ == 0.0) return 0.0;
    return p_ == 2.0 ? scale_ * std::sqrt(ssq_) : scale_ * std::pow(ssq_, 1.0 / p_);
  }

 private:
  double power(double t) const { return p_ == 2.0 ? t * t : std::pow(t, p_); }
  double p_;
  double scale_ = 0.0;
  double ssq_ = 0.0;
  double sum_ = 0.0;
};

bool all_leaves(const SpaceNode& node) {
  return std::all_of(node.children.begin(), node.children.end(),
                     [](const auto& c) { return c->leaf; });
}

bool smooth_tree(const SpaceNode& node) {
  if (node.leaf) return true;
  if (!node.exponent.is_smooth()) return false;
  return std::all_of(node.children.begin(), node.children.end(),
                     [](const auto& c) { return smooth_tree(*c); });
}

bool same_tree(const SpaceNode& a, const SpaceNode& b) {
  if (&a == &b) return true;
  if (a.leaf != b.leaf) return false;
  if (a.leaf) return true;
  if (!(a.exponent == b.exponent) || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_tree(*a.children[i], *b.children[i])) return false;
  return true;
}

std::shared_ptr<const SpaceNode> conjugate_tree(const std::shared_ptr<const SpaceNode>& node) {
  if (node->leaf) return node;
  auto out = std::make_shared<SpaceNode>(*node);
  out->exponent = node->exponent.conjugate();
  for (auto& c : out->children) c = conjugate_tree(c);
  return out;
}

const std::shared_ptr<const SpaceNode>& leaf_node() {
  static const std::shared_ptr<const SpaceNode> leaf = std::make_shared<SpaceNode>();
  return leaf;
}

void check_coords(const SpaceDescriptor& space, const std::vector<Scalar>& coords, const char* what) {
  if (coords.size() != space.dim())
    throw DescriptorMismatch(std::string(what) + " has " + std::to_string(coords.size()) +
                             " coordinates, space dimension is " + std::to_string(space.dim()));
  if (space.field() == Field::real) {
    for (const Scalar& c : coords)
      if (c.imag() != 0.0)
        throw FieldMismatch(std::string(what) + " has a complex coordinate in a real space");
  }
}

}  // namespace

std::string to_string(Field field) { return field == Field::real ? "real" : "complex"; }

Exponent Exponent::of(double p) {
  if (std::isnan(p) || p < 1.0) throw OutOfRange("exponent must lie in [1, inf], got " + std::to_string(p));
  if (p == kInf) return infinity();
  if (p == 1.0) return one();
  return Exponent(p, p / (p - 1.0));
}

SpaceDescriptor SpaceDescriptor::scalar(Field field) { return SpaceDescriptor(leaf_node(), field); }

SpaceDescriptor SpaceDescriptor::lp(Exponent p, std::size_t dim, Field field) {
  if (dim == 0) throw DegenerateInput("l_p^m needs m >= 1");
  std::vector<SpaceDescriptor> leaves(dim, scalar(field));
  return psum(p, leaves);
}

SpaceDescriptor SpaceDescriptor::psum(Exponent p, const std::vector<SpaceDescriptor>& children) {
  if (children.empty()) throw DegenerateInput("a p-sum needs at least one child");
  auto node = std::make_shared<SpaceNode>();
  node->leaf = false;
  node->exponent = p;
  node->dim = 0;
  const Field field = children.front().field();
  for (const auto& c : children) {
    if (c.field() != field) throw FieldMismatch("p-sum children over different fields");
    node->children.push_back(c.root_);
    node->dim += c.dim();
  }
  return SpaceDescriptor(std::move(node), field);
}

Exponent SpaceDescriptor::exponent() const {
  if (root_->leaf) throw DegenerateInput("a scalar leaf has no exponent");
  return root_->exponent;
}

SpaceDescriptor SpaceDescriptor::child(std::size_t i) const {
  if (i >= root_->children.size()) throw OutOfRange("child index " + std::to_string(i) + " out of range");
  return SpaceDescriptor(root_->children[i], field_);
}

std::size_t SpaceDescriptor::child_offset(std::size_t i) const {
  if (i > root_->children.size()) throw OutOfRange("child index " + std::to_string(i) + " out of range");
  std::size_t offset = 0;
  for (std::size_t k = 0; k < i; ++k) offset += root_->children[k]->dim;
  return offset;
}

bool SpaceDescriptor::is_flat() const noexcept { return root_->leaf || all_leaves(*root_); }

Exponent SpaceDescriptor::flat_exponent() const {
  if (root_->leaf) return Exponent::one();
  if (!all_leaves(*root_)) throw DegenerateInput("descriptor is not a flat l_p^m");
  return root_->exponent;
}

namespace {
bool uniform_tree(const SpaceNode& node, const Exponent& p) {
  if (node.leaf) return true;
  if (!(node.exponent == p)) return false;
  return std::all_of(node.children.begin(), node.children.end(),
                     [&p](const auto& c) { return uniform_tree(*c, p); });
}
}  // namespace

std::optional<Exponent> SpaceDescriptor::uniform_exponent() const {
  if (root_->leaf) return Exponent::one();
  if (!uniform_tree(*root_, root_->exponent)) return std::nullopt;
  return root_->exponent;
}

bool SpaceDescriptor::all_smooth() const noexcept { return smooth_tree(*root_); }

bool operator==(const SpaceDescriptor& a, const SpaceDescriptor& b) {
  return a.field_ == b.field_ && same_tree(*a.root_, *b.root_);
}

SpaceDescriptor dual_descriptor(const SpaceDescriptor& space) {
  if (space.is_leaf()) return space;
  std::vector<SpaceDescriptor> children;
  for (std::size_t i = 0; i < space.child_count(); ++i) children.push_back(dual_descriptor(space.child(i)));
  return SpaceDescriptor::psum(space.exponent().conjugate(), children);
}

Vector::Vector(SpaceDescriptor space, std::vector<Scalar> coords)
    : space_(std::move(space)), coords_(std::move(coords)) {
  check_coords(space_, coords_, "vector");
}

Vector Vector::zero(const SpaceDescriptor& space) { return Vector(space, std::vector<Scalar>(space.dim())); }

Vector Vector::unit(const SpaceDescriptor& space, std::size_t i) {
  if (i >= space.dim()) throw OutOfRange("unit vector index out of range");
  std::vector<Scalar> c(space.dim());
  c[i] = 1.0;
  return Vector(space, std::move(c));
}

Functional::Functional(SpaceDescriptor space, std::vector<Scalar> coords)
    : space_(std::move(space)), coords_(std::move(coords)) {
  check_coords(space_, coords_, "functional");
}

Functional Functional::zero(const SpaceDescriptor& space) {
  return Functional(space, std::vector<Scalar>(space.dim()));
}

namespace kernel {

double norm(const SpaceNode& node, std::span<const Scalar> x, bool conjugate) {
  if (node.leaf) return std::abs(x[0]);
  PAccumulator acc(effective_p(node, conjugate));
  std::size_t offset = 0;
  for (const auto& child : node.children) {
    acc.add(norm(*child, x.subspan(offset, child->dim), conjugate));
    offset += child->dim;
  }
  return acc.result();
}

void norming(const SpaceNode& node, std::span<const Scalar> x, std::span<Scalar> out, bool conjugate) {
  if (node.leaf) {
    const double r = std::abs(x[0]);
    out[0] = r == 0.0 ? Scalar(0.0) : std::conj(x[0]) / r;
    return;
  }
  const double p = effective_p(node, conjugate);
  const std::size_t nblocks = node.children.size();

  // Block norms, total norm.
  double small[16];
  std::vector<double> large;
  double* block = small;
  if (nblocks > 16) {
    large.resize(nblocks);
    block = large.data();
  }
  PAccumulator acc(p);
  std::size_t offset = 0;
  for (std::size_t s = 0; s < nblocks; ++s) {
    const auto& child = *node.children[s];
    block[s] = norm(child, x.subspan(offset, child.dim), conjugate);
    acc.add(block[s]);
    offset += child.dim;
  }
  const double total = acc.result();

  std::size_t chosen = nblocks;  // inf-sum: first block of maximal norm
  if (p == kInf && total > 0.0) {
    for (std::size_t s = 0; s < nblocks; ++s)
      if (block[s] == total) {
        chosen = s;
        break;
      }
  }

  offset = 0;
  for (std::size_t s = 0; s < nblocks; ++s) {
    const auto& child = *node.children[s];
    auto xs = x.subspan(offset, child.dim);
    auto os = out.subspan(offset, child.dim);
    offset += child.dim;
    double weight = 0.0;
    if (total > 0.0 && block[s] > 0.0) {
      if (p == kInf) weight = s == chosen ? 1.0 : 0.0;
      else if (p == 1.0) weight = 1.0;
      else if (p == 2.0) weight = block[s] / total;
      else weight = std::pow(block[s] / total, p - 1.0);
    }
    if (weight == 0.0) {
      std::fill(os.begin(), os.end(), Scalar(0.0));
      continue;
    }
    norming(child, xs, os, conjugate);
    if (weight != 1.0)
      for (auto& v : os) v *= weight;
  }
}

Scalar pairing(std::span<const Scalar> f, std::span<const Scalar> x) {
  Scalar s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * x[i];
  return s;
}

}  // namespace kernel

double norm(const Vector& v) { return kernel::norm(v.space().node(), v.coords()); }

double dual_norm(const Functional& f) { return kernel::norm(f.space().node(), f.coords(), true); }

Scalar eval(const Functional& f, const Vector& v) {
  if (f.space().field() != v.space().field()) throw FieldMismatch("eval: functional and vector over different fields");
  if (!(f.space() == v.space())) throw DescriptorMismatch("eval: functional and vector bound to different spaces");
  return kernel::pairing(f.coords(), v.coords());
}

Functional norming_functional(const Vector& x) {
  const double r = norm(x);
  if (r == 0.0) throw DegenerateInput("norming functional of the zero vector");
  std::vector<Scalar> out(x.size());
  kernel::norming(x.space().node(), x.coords(), out);
  return Functional(x.space(), std::move(out));
}

NormingPair make_norming_pair(const Vector& x) {
  const double r = norm(x);
  if (r == 0.0) throw DegenerateInput("norming pair of the zero vector");
  std::vector<Scalar> unit(x.coords().begin(), x.coords().end());
  for (auto& c : unit) c /= r;
  Vector u(x.space(), std::move(unit));
  Functional f = norming_functional(u);
  const double slack = std::max({std::abs(norm(u) - 1.0), std::abs(dual_norm(f) - 1.0),
                                 std::abs(eval(f, u) - Scalar(1.0))});
  return NormingPair{std::move(u), std::move(f), slack};
}

Vector unit_sphere_sample(const SpaceDescriptor& space, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Scalar> c(space.dim());
  for (;;) {
    for (auto& v : c) {
      const double re = gauss(rng);
      const double im = space.field() == Field::complex ? gauss(rng) : 0.0;
      v = Scalar(re, im);
    }
    const double r = kernel::norm(space.node(), c);
    if (r > 0.0) {
      for (auto& v : c) v /= r;
      return Vector(space, std::move(c));
    }
  }
}

}  // namespace numidx
