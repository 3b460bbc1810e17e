#pragma once

// Matrix exchange format:
//
//   {"descriptor": "<descriptor text>",
//    "field": "real" | "complex",
//    "matrix": [[a11, a12, ...], [a21, ...], ...]}
//
// Entries are numbers (real field) or [re, im] pairs (complex field). A flat
// row-major array of dim*dim entries is accepted on input. Doubles are written
// in shortest round-trip form, so write -> read is exact.

#include <optional>
#include <string>
#include <string_view>

#include "numidx/operator.hpp"
#include "numidx/polynomial.hpp"

namespace numidx {

struct OperatorOverrides {
  std::optional<SpaceDescriptor> space;
  std::optional<Field> field;
};

/// Throws ParseError naming the offending field.
Operator read_operator_json(std::string_view text, const OperatorOverrides& overrides = {});
std::string write_operator_json(const Operator& t);

Operator read_operator_file(const std::string& path, const OperatorOverrides& overrides = {});

/// Polynomial exchange format: the operator format with "degree": k and a flat
/// "coefficients" array of dim^(k+1) entries, output index first.
HomogeneousPolynomial read_polynomial_json(std::string_view text, const OperatorOverrides& overrides = {});
std::string write_polynomial_json(const HomogeneousPolynomial& p);

/// True when the JSON text carries a "degree" key (a polynomial document).
bool is_polynomial_json(std::string_view text);

std::string read_text_file(const std::string& path);

}  // namespace numidx
