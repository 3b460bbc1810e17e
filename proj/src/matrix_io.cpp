#include "numidx/matrix_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "numidx/descriptor_text.hpp"

namespace numidx {

namespace {

using nlohmann::json;

Scalar read_entry(const json& e, Field field, const std::string& where) {
  if (e.is_number()) return Scalar(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    const Scalar z(e[0].get<double>(), e[1].get<double>());
    if (field == Field::real && z.imag() != 0.0) throw ParseError(where, "complex entry in a real document");
    return z;
  }
  throw ParseError(where, "expected a number or an [re, im] pair");
}

bool is_entry(const json& e) {
  return e.is_number() || (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number());
}

json parse_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("json", e.what());
  }
  if (!doc.is_object()) throw ParseError("json", "top level must be an object");
  return doc;
}

// Resolves the space: an explicit override wins, then the "field" key, then
// any field= argument inside the descriptor text.
SpaceDescriptor document_space(const json& doc, const OperatorOverrides& overrides) {
  std::optional<Field> field;
  if (doc.contains("field")) {
    if (!doc["field"].is_string()) throw ParseError("field", "must be a string");
    const std::string f = doc["field"].get<std::string>();
    if (f == "real") field = Field::real;
    else if (f == "complex") field = Field::complex;
    else throw ParseError("field", "expected real or complex, got '" + f + "'");
  }
  if (overrides.field) field = overrides.field;

  std::optional<SpaceDescriptor> space = overrides.space;
  if (!space) {
    if (!doc.contains("descriptor")) throw ParseError("descriptor", "missing (and no space given)");
    if (!doc["descriptor"].is_string()) throw ParseError("descriptor", "must be a string");
    space = parse_descriptor(doc["descriptor"].get<std::string>());
  }
  return field ? space->with_field(*field) : *space;
}

json write_entry(Scalar z, bool complex) {
  if (complex) return json::array({z.real(), z.imag()});
  return z.real();
}

std::string descriptor_text(const SpaceDescriptor& space) { return serialize_descriptor(space.with_field(Field::real)); }

}  // namespace

Operator read_operator_json(std::string_view text, const OperatorOverrides& overrides) {
  const json doc = parse_document(text);
  const SpaceDescriptor space = document_space(doc, overrides);
  const Field field = space.field();

  if (!doc.contains("matrix") || !doc["matrix"].is_array()) throw ParseError("matrix", "missing or not an array");
  const json& m = doc["matrix"];
  const std::size_t n = space.dim();
  std::vector<Scalar> entries;
  entries.reserve(n * n);
  const bool flat = m.size() == n * n && std::all_of(m.begin(), m.end(), is_entry);
  if (flat) {
    for (std::size_t k = 0; k < n * n; ++k) entries.push_back(read_entry(m[k], field, "matrix[" + std::to_string(k) + "]"));
  } else {
    if (m.size() != n)
      throw ParseError("matrix", "has " + std::to_string(m.size()) + " rows, space dimension is " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (!m[i].is_array() || m[i].size() != n)
        throw ParseError("matrix[" + std::to_string(i) + "]", "row must have " + std::to_string(n) + " entries");
      for (std::size_t j = 0; j < n; ++j)
        entries.push_back(read_entry(m[i][j], field, "matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
    }
  }
  return Operator(space, Matrix(n, std::move(entries)));
}

std::string write_operator_json(const Operator& t) {
  json doc;
  const bool complex = t.space().field() == Field::complex;
  doc["descriptor"] = descriptor_text(t.space());
  doc["field"] = to_string(t.space().field());
  json rows = json::array();
  for (std::size_t i = 0; i < t.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < t.dim(); ++j) row.push_back(write_entry(t.matrix()(i, j), complex));
    rows.push_back(std::move(row));
  }
  doc["matrix"] = std::move(rows);
  return doc.dump();
}

Operator read_operator_file(const std::string& path, const OperatorOverrides& overrides) {
  return read_operator_json(read_text_file(path), overrides);
}

HomogeneousPolynomial read_polynomial_json(std::string_view text, const OperatorOverrides& overrides) {
  const json doc = parse_document(text);
  const SpaceDescriptor space = document_space(doc, overrides);
  if (!doc.contains("degree") || !doc["degree"].is_number_integer() || doc["degree"].get<int>() < 1)
    throw ParseError("degree", "must be an integer >= 1");
  const int degree = doc["degree"].get<int>();
  check_polynomial_cap(space.dim(), degree);
  std::size_t size = space.dim();
  for (int k = 0; k < degree; ++k) size *= space.dim();
  if (!doc.contains("coefficients") || !doc["coefficients"].is_array() || doc["coefficients"].size() != size)
    throw ParseError("coefficients", "must be a flat array of " + std::to_string(size) + " entries");
  std::vector<Scalar> c;
  c.reserve(size);
  for (std::size_t k = 0; k < size; ++k)
    c.push_back(read_entry(doc["coefficients"][k], space.field(), "coefficients[" + std::to_string(k) + "]"));
  return HomogeneousPolynomial(space, degree, std::move(c));
}

std::string write_polynomial_json(const HomogeneousPolynomial& p) {
  json doc;
  const bool complex = p.space().field() == Field::complex;
  doc["descriptor"] = descriptor_text(p.space());
  doc["field"] = to_string(p.space().field());
  doc["degree"] = p.degree();
  json c = json::array();
  for (const Scalar& z : p.coefficients()) c.push_back(write_entry(z, complex));
  doc["coefficients"] = std::move(c);
  return doc.dump();
}

bool is_polynomial_json(std::string_view text) {
  const json doc = parse_document(text);
  return doc.contains("degree");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("path", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace numidx
