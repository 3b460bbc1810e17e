#include "numidx/descriptor_text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace numidx {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SpaceDescriptor parse_root() {
    Field field = Field::real;
    SpaceDescriptor d = parse_node(/*root=*/true, &field);
    skip_ws();
    if (pos_ != text_.size()) fail("descriptor", "unexpected trailing text '" + std::string(text_.substr(pos_)) + "'");
    return d.with_field(field);
  }

 private:
  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ParseError(field, what + " (at offset " + std::to_string(pos_) + ")");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const std::string& field) {
    if (!consume(c)) fail(field, std::string("expected '") + c + "'");
  }

  std::string_view identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::string_view token() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ')' && text_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  Exponent parse_exponent() {
    const std::string_view t = token();
    if (t == "inf") return Exponent::infinity();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
      fail("p", "not a number: '" + std::string(t) + "'");
    if (!(value >= 1.0) || std::isinf(value)) fail("p", "exponent must lie in [1, inf]");
    return Exponent::of(value);
  }

  std::size_t parse_dim() {
    const std::string_view t = token();
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) fail("dim", "not a positive integer: '" + std::string(t) + "'");
    if (value == 0) fail("dim", "dimension must be >= 1");
    return value;
  }

  Field parse_field() {
    const std::string_view t = token();
    if (t == "real") return Field::real;
    if (t == "complex") return Field::complex;
    fail("field", "expected real or complex, got '" + std::string(t) + "'");
  }

  SpaceDescriptor parse_node(bool root, Field* field) {
    const std::string_view kind = identifier();
    if (kind.empty()) fail("descriptor", "expected scalar, lp(...) or psum(...)");
    if (kind != "scalar" && kind != "lp" && kind != "psum") fail("descriptor", "unknown node '" + std::string(kind) + "'");

    std::optional<Exponent> p;
    std::optional<std::size_t> dim;
    std::optional<std::vector<SpaceDescriptor>> children;
    bool field_seen = false;

    if (!consume('(')) {
      if (kind == "scalar") return SpaceDescriptor::scalar();
      fail(std::string(kind), "expected '('");
    }
    bool first = true;
    while (!consume(')')) {
      if (!first) expect(',', std::string(kind));
      first = false;
      skip_ws();
      if (kind == "psum" && pos_ < text_.size() && text_[pos_] == '[') {
        if (children) fail("children", "child list given twice");
        ++pos_;
        children.emplace();
        if (!consume(']')) {
          do {
            children->push_back(parse_node(false, nullptr));
          } while (consume(','));
          expect(']', "children");
        }
        continue;
      }
      const std::string_view key = identifier();
      expect('=', key.empty() ? std::string(kind) : std::string(key));
      if (key == "p" && kind != "scalar") {
        if (p) fail("p", "given twice");
        p = parse_exponent();
      } else if (key == "dim" && kind == "lp") {
        if (dim) fail("dim", "given twice");
        dim = parse_dim();
      } else if (key == "field") {
        if (!root) fail("field", "only allowed on the root node");
        if (field_seen) fail("field", "given twice");
        field_seen = true;
        *field = parse_field();
      } else {
        fail(key.empty() ? std::string(kind) : std::string(key),
             "unexpected argument for " + std::string(kind));
      }
    }

    if (kind == "scalar") return SpaceDescriptor::scalar();
    if (!p) fail("p", "missing exponent");
    if (kind == "lp") {
      if (!dim) fail("dim", "missing dimension");
      return SpaceDescriptor::lp(*p, *dim);
    }
    if (!children) fail("children", "missing child list");
    if (children->empty()) fail("children", "a p-sum needs at least one child");
    return SpaceDescriptor::psum(*p, *children);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void write_node(const SpaceDescriptor& d, std::string& out, bool root) {
  const bool complex_root = root && d.field() == Field::complex;
  if (d.is_leaf()) {
    out += complex_root ? "scalar(field=complex)" : "scalar";
    return;
  }
  bool flat = true;
  for (std::size_t i = 0; i < d.child_count(); ++i) flat = flat && d.child(i).is_leaf();
  if (flat) {
    out += "lp(p=" + format_double(d.exponent().value()) + ", dim=" + std::to_string(d.dim());
  } else {
    out += "psum(p=" + format_double(d.exponent().value()) + ", [";
    for (std::size_t i = 0; i < d.child_count(); ++i) {
      if (i) out += ", ";
      write_node(d.child(i), out, false);
    }
    out += "]";
  }
  if (complex_root) out += ", field=complex";
  out += ")";
}

}  // namespace

SpaceDescriptor parse_descriptor(std::string_view text) { return Parser(text).parse_root(); }

std::string serialize_descriptor(const SpaceDescriptor& space) {
  std::string out;
  write_node(space, out, true);
  return out;
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace numidx
