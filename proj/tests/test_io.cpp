#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "dctc/io.hpp"
#include "dctc/qmath.hpp"

using namespace dctc;

TEST_CASE("format_double keeps full double precision", "[io]") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("matrix text round trip is bit-exact", "[io]") {
  Rng rng(17);
  ComplexMatrix m(3, 4);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = Complex(rng.gaussian(), rng.gaussian());
  const ComplexMatrix back = matrix_from_text(matrix_to_text(m));
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 4);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix reader rejects malformed input", "[io]") {
  std::istringstream bad_header("x y\n");
  CHECK_THROWS_AS(read_matrix(bad_header), std::runtime_error);
  std::istringstream truncated("2 2\n1 0 0 0\n1 0\n");
  CHECK_THROWS_AS(read_matrix(truncated), std::runtime_error);
}

TEST_CASE("csv writer quotes exactly the fields that need it", "[io][csv]") {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.write_row({"hello", "a,b", "say \"hi\"", "line\nbreak"});
  csv.write_row({"1", "2.5"});
  CHECK(out.str() == "hello,\"a,b\",\"say \"\"hi\"\"\",\"line\nbreak\"\n1,2.5\n");
}

TEST_CASE("log-log plot emits an svg document over the data range", "[io][svg]") {
  std::ostringstream out;
  write_svg_loglog_plot(out, "title", "x", "y",
                        {{"series", {{100.0, 1e-2}, {1000.0, 1e-3}, {10000.0, 3e-4}}}});
  const std::string svg = out.str();
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("title") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("1e-3") != std::string::npos);  // decade tick label
}

TEST_CASE("log-log plot rejects empty or nonpositive data", "[io][svg]") {
  std::ostringstream out;
  CHECK_THROWS_AS(write_svg_loglog_plot(out, "t", "x", "y", {}), std::invalid_argument);
  CHECK_THROWS_AS(write_svg_loglog_plot(out, "t", "x", "y", {{"s", {{10.0, 0.0}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(write_svg_loglog_plot(out, "t", "x", "y", {{"s", {{-1.0, 2.0}}}}),
                  std::invalid_argument);
}
