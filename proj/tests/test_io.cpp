#include <doctest.h>

#include <cmath>

#include "numidx/descriptor_text.hpp"
#include "numidx/matrix_io.hpp"

using namespace numidx;

namespace {

std::string parse_error_field(std::string_view text) {
  try {
    parse_descriptor(text);
  } catch (const ParseError& e) {
    return e.field();
  }
  return "<none>";
}

std::string matrix_error_field(std::string_view text) {
  try {
    read_operator_json(text);
  } catch (const ParseError& e) {
    return e.field();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("descriptor text parses the three node kinds") {
  CHECK(parse_descriptor("scalar") == SpaceDescriptor::scalar());
  CHECK(parse_descriptor("lp(p=3, dim=2)") == SpaceDescriptor::lp(Exponent::of(3.0), 2));
  CHECK(parse_descriptor("lp(p=inf,dim=4)") == SpaceDescriptor::lp(Exponent::infinity(), 4));
  CHECK(parse_descriptor(" psum( p = 1 , [ lp(p=2, dim=2), scalar ] ) ") ==
        SpaceDescriptor::psum(Exponent::one(), {SpaceDescriptor::lp(Exponent::of(2.0), 2), SpaceDescriptor::scalar()}));
  CHECK(parse_descriptor("lp(p=2, dim=2, field=complex)").field() == Field::complex);
  CHECK(parse_descriptor("psum(p=2, [scalar, scalar], field=complex)").child(1).field() == Field::complex);
}

TEST_CASE("descriptor text round trip is exact") {
  const std::vector<std::string> texts = {
      "scalar",
      "lp(p=1, dim=3)",
      "lp(p=0.1e1, dim=2)",
      "lp(p=1.2345678901234567, dim=2, field=complex)",
      "psum(p=3, [psum(p=1.5, [lp(p=inf, dim=2), scalar]), scalar])",
      "psum(p=inf, [lp(p=1, dim=2), lp(p=4, dim=1), psum(p=2, [scalar])])",
  };
  for (const auto& t : texts) {
    const auto d = parse_descriptor(t);
    const auto text = serialize_descriptor(d);
    CHECK(parse_descriptor(text) == d);
    CHECK(serialize_descriptor(parse_descriptor(text)) == text);
  }
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("descriptor text errors name the offending element") {
  CHECK(parse_error_field("lp(p=0.5, dim=2)") == "p");
  CHECK(parse_error_field("lp(p=abc, dim=2)") == "p");
  CHECK(parse_error_field("lp(p=2)") == "dim");
  CHECK(parse_error_field("lp(p=2, dim=0)") == "dim");
  CHECK(parse_error_field("lp(p=2, dim=-1)") == "dim");
  CHECK(parse_error_field("psum(p=2, [])") == "children");
  CHECK(parse_error_field("psum(p=2)") == "children");
  CHECK(parse_error_field("ball(p=2)") == "descriptor");
  CHECK(parse_error_field("lp(p=2, dim=2) extra") == "descriptor");
  CHECK(parse_error_field("lp(p=2, dim=2, field=quaternion)") == "field");
  CHECK(parse_error_field("psum(p=2, [lp(p=2, dim=2, field=real)])") == "field");
  CHECK(parse_error_field("") == "descriptor");
}

TEST_CASE("operator json round trip is exact") {
  const auto s = SpaceDescriptor::psum(Exponent::of(3.0), {SpaceDescriptor::lp(Exponent::of(1.5), 2), SpaceDescriptor::scalar()});
  Rng rng(4);
  for (Field field : {Field::real, Field::complex}) {
    const auto t = gaussian_operator(s.with_field(field), rng);
    const auto back = read_operator_json(write_operator_json(t));
    CHECK(back.space() == t.space());
    CHECK(back.matrix() == t.matrix());
  }
}

TEST_CASE("operator json accepts flat arrays and overrides") {
  const auto t = read_operator_json(R"j({"descriptor": "lp(p=2, dim=2)", "matrix": [0, -1, 1, 0]})j");
  CHECK(t.matrix()(0, 1) == Scalar(-1.0));
  CHECK(t.matrix()(1, 0) == Scalar(1.0));
  CHECK(t.space().field() == Field::real);

  const auto c = read_operator_json(R"j({"descriptor": "lp(p=2, dim=2)", "field": "complex", "matrix": [[[0, 1], 0], [0, 0]]})j");
  CHECK(c.space().field() == Field::complex);
  CHECK(c.matrix()(0, 0) == Scalar(0.0, 1.0));

  OperatorOverrides o;
  o.space = SpaceDescriptor::lp(Exponent::of(3.0), 2);
  o.field = Field::complex;
  const auto w = read_operator_json(R"j({"descriptor": "lp(p=2, dim=2)", "field": "real", "matrix": [[1, 0], [0, 1]]})j", o);
  CHECK(w.space() == SpaceDescriptor::lp(Exponent::of(3.0), 2, Field::complex));
}

TEST_CASE("operator json errors name the offending field") {
  CHECK(matrix_error_field("not json") == "json");
  CHECK(matrix_error_field("[1, 2]") == "json");
  CHECK(matrix_error_field(R"j({"matrix": [[1]]})j") == "descriptor");
  CHECK(matrix_error_field(R"j({"descriptor": "lp(p=2, dim=2)"})j") == "matrix");
  CHECK(matrix_error_field(R"j({"descriptor": "lp(p=2, dim=2)", "matrix": [[1, 0]]})j") == "matrix");
  CHECK(matrix_error_field(R"j({"descriptor": "lp(p=2, dim=2)", "matrix": [[1, 0], [0]]})j") == "matrix[1]");
  CHECK(matrix_error_field(R"j({"descriptor": "lp(p=2, dim=2)", "matrix": [[1, 0], [0, "x"]]})j") == "matrix[1][1]");
  CHECK(matrix_error_field(R"j({"descriptor": "lp(p=2, dim=2)", "matrix": [[1, 0], [0, [1, 2]]]})j") == "matrix[1][1]");
  CHECK(matrix_error_field(R"j({"descriptor": "lp(p=2, dim=2)", "field": "octonion", "matrix": [[1, 0], [0, 1]]})j") == "field");
  CHECK(matrix_error_field(R"j({"descriptor": "lp(p=2, dim=0)", "matrix": []})j") == "dim");
  CHECK_THROWS_AS(read_operator_file("/nonexistent/matrix.json"), ParseError);
}

TEST_CASE("polynomial json round trip") {
  const auto s = SpaceDescriptor::lp(Exponent::of(2.0), 2);
  Rng rng(8);
  const auto p = gaussian_polynomial(s, 2, rng);
  const auto text = write_polynomial_json(p);
  CHECK(is_polynomial_json(text));
  CHECK_FALSE(is_polynomial_json(R"j({"descriptor": "scalar", "matrix": [[1]]})j"));
  const auto back = read_polynomial_json(text);
  CHECK(back.degree() == 2);
  REQUIRE(back.coefficients().size() == p.coefficients().size());
  for (std::size_t k = 0; k < p.coefficients().size(); ++k) CHECK(back.coefficients()[k] == p.coefficients()[k]);
  CHECK_THROWS_AS(read_polynomial_json(R"j({"descriptor": "lp(p=2, dim=2)", "degree": 2, "coefficients": [1, 2]})j"), ParseError);
  CHECK_THROWS_AS(read_polynomial_json(R"j({"descriptor": "lp(p=2, dim=2)", "degree": 0, "coefficients": []})j"), ParseError);
}
