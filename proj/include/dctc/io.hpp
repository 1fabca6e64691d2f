#pragma once

// Plain-text serialization: complex matrices in a whitespace format that
// round-trips doubles exactly, and RFC-4180 CSV output with LF line endings.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dctc/qmath.hpp"

namespace dctc {

// Shortest representation that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// Matrix text format: a header line "rows cols", then one line per matrix
// row containing "re im" pairs in column order.
inline void write_matrix(std::ostream& out, const ComplexMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(m(i, j).real()) << ' ' << format_double(m(i, j).imag());
    }
    out << '\n';
  }
}

inline std::string matrix_to_text(const ComplexMatrix& m) {
  std::ostringstream oss;
  write_matrix(oss, m);
  return oss.str();
}

inline ComplexMatrix read_matrix(std::istream& in) {
  Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw std::runtime_error("read_matrix: bad header");
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      double re = 0.0, im = 0.0;
      if (!(in >> re >> im)) throw std::runtime_error("read_matrix: truncated entry data");
      m(i, j) = Complex(re, im);
    }
  return m;
}

inline ComplexMatrix matrix_from_text(const std::string& text) {
  std::istringstream iss(text);
  return read_matrix(iss);
}

// Minimal SVG line plot (one polyline per series) with log-log axes ticks at
// decades.  Enough to eyeball an error-versus-samples trend without pulling
// in a plotting dependency.
struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y), all positive
};

inline void write_svg_loglog_plot(std::ostream& out, const std::string& title,
                                  const std::string& x_label, const std::string& y_label,
                                  const std::vector<PlotSeries>& series) {
  const double width = 640, height = 440, left = 70, right = 20, top = 40, bottom = 50;
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!(x > 0) || !(y > 0)) throw std::invalid_argument("write_svg_loglog_plot: nonpositive data");
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (first) throw std::invalid_argument("write_svg_loglog_plot: no data");
  auto pad = [](double& lo, double& hi) {
    const double lo_dec = std::floor(std::log10(lo)), hi_dec = std::ceil(std::log10(hi));
    lo = lo_dec;
    hi = hi_dec > lo_dec ? hi_dec : lo_dec + 1;
  };
  double lx0 = x_min, lx1 = x_max, ly0 = y_min, ly1 = y_max;
  pad(lx0, lx1);
  pad(ly0, ly1);
  auto px = [&](double x) { return left + (std::log10(x) - lx0) / (lx1 - lx0) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - (std::log10(y) - ly0) / (ly1 - ly0) * (height - top - bottom); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (top + height - bottom) / 2 << ")\">" << y_label << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right
      << "\" height=\"" << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double dec = lx0; dec <= lx1 + 0.5; dec += 1.0) {
    const double x = px(std::pow(10.0, dec));
    out << "<line x1=\"" << x << "\" y1=\"" << height - bottom << "\" x2=\"" << x << "\" y2=\""
        << height - bottom + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << height - bottom + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">1e" << static_cast<int>(dec) << "</text>\n";
  }
  for (double dec = ly0; dec <= ly1 + 0.5; dec += 1.0) {
    const double y = py(std::pow(10.0, dec));
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\">1e" << static_cast<int>(dec) << "</text>\n";
  }
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  int idx = 0;
  for (const auto& s : series) {
    const char* color = colors[idx % 4];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : s.points)
      out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    out << "<text x=\"" << width - right - 8 << "\" y=\"" << top + 16 + 16 * idx
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">" << s.name
        << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

// CSV writer.  Fields containing commas, quotes, or line breaks are quoted
// with embedded quotes doubled; rows always end in a bare LF.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  static std::string escape(const std::string& field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string quoted = "\"";
    for (char c : field) {
      if (c == '"') quoted += "\"\"";
      else quoted += c;
    }
    quoted += '"';
    return quoted;
  }

  void write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << escape(fields[i]);
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

}  // namespace dctc
