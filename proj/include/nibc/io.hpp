#pragma once

// Deterministic text output: CSV with 17 significant digits, a minimal SVG
// writer for the region figure, and the FockVector state dump.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nibc/fock.hpp"
#include "nibc/params.hpp"

namespace nibc {

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    cols_ = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    if (values.size() != cols_) throw std::runtime_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_g17(values[i]);
    }
    out_ << '\n';
  }

  void row_strings(const std::vector<std::string>& values) {
    if (values.size() != cols_) throw std::runtime_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << values[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  std::size_t cols_ = 0;
};

// ---------------------------------------------------------------------------
// FockVector state dump: one header line with the sector sizes, then one
// line per sector with the coefficients.

inline void save_state(const std::string& path, const FockVector& psi) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_state: cannot open " + path);
  out << "sectors," << psi.sectors.size() << '\n';
  out << "dims";
  for (const auto& s : psi.sectors) out << ',' << s.size();
  out << '\n';
  for (const auto& s : psi.sectors) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (i) out << ',';
      out << format_g17(s[i]);
    }
    out << '\n';
  }
}

inline FockVector load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_state: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("sectors,", 0) != 0)
    throw std::runtime_error("load_state: bad header");
  const auto nsec = static_cast<std::size_t>(std::stoul(line.substr(8)));
  if (!std::getline(in, line) || line.rfind("dims", 0) != 0)
    throw std::runtime_error("load_state: bad dims line");
  std::vector<Eigen::Index> dims;
  {
    std::stringstream ss(line.substr(4));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      dims.push_back(static_cast<Eigen::Index>(std::stoll(tok)));
    }
  }
  if (dims.size() != nsec) throw std::runtime_error("load_state: sector count mismatch");
  FockVector psi;
  psi.sectors.resize(nsec);
  for (std::size_t n = 0; n < nsec; ++n) {
    if (!std::getline(in, line)) throw std::runtime_error("load_state: truncated file");
    psi.sectors[n].resize(dims[n]);
    std::stringstream ss(line);
    std::string tok;
    Eigen::Index i = 0;
    while (std::getline(ss, tok, ',') && i < dims[n]) psi.sectors[n][i++] = std::stod(tok);
    if (i != dims[n]) throw std::runtime_error("load_state: row length mismatch");
  }
  return psi;
}

// ---------------------------------------------------------------------------
// Region figure. Solid piecewise bound shaded below, dash-dotted old bound,
// dashed beta/2 line, hollow marker at the excluded corner (2, 0).

class SvgCanvas {
 public:
  SvgCanvas(double xmin, double xmax, double ymin, double ymax, int width, int height)
      : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), w_(width), h_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\""
          << h_ << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n";
    body_ << "<rect width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"white\"/>\n";
  }

  double px(double x) const { return margin_ + (x - xmin_) / (xmax_ - xmin_) * (w_ - 2 * margin_); }
  double py(double y) const { return h_ - margin_ - (y - ymin_) / (ymax_ - ymin_) * (h_ - 2 * margin_); }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& style) {
    body_ << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      body_ << px(xs[i]) << ',' << py(ys[i]) << ' ';
    body_ << "\"/>\n";
  }

  void filled_region(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::string& fill, double opacity) {
    body_ << "<polygon stroke=\"none\" fill=\"" << fill << "\" fill-opacity=\"" << opacity
          << "\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      body_ << px(xs[i]) << ',' << py(ys[i]) << ' ';
    body_ << px(xs.back()) << ',' << py(0.0) << ' ' << px(xs.front()) << ',' << py(0.0);
    body_ << "\"/>\n";
  }

  void hollow_marker(double x, double y, double r = 5.0) {
    body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"" << r
          << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  }

  void text(double x, double y, const std::string& s) {
    body_ << "<text x=\"" << px(x) << "\" y=\"" << py(y) << "\" font-size=\"12\">" << s
          << "</text>\n";
  }

  void axes(const std::string& xlabel, const std::string& ylabel) {
    body_ << "<line x1=\"" << px(xmin_) << "\" y1=\"" << py(ymin_) << "\" x2=\"" << px(xmax_)
          << "\" y2=\"" << py(ymin_) << "\" stroke=\"black\"/>\n";
    body_ << "<line x1=\"" << px(xmax_) << "\" y1=\"" << py(ymin_) << "\" x2=\"" << px(xmax_)
          << "\" y2=\"" << py(ymax_) << "\" stroke=\"black\"/>\n";
    text(0.45 * (xmin_ + xmax_), ymin_ - 0.06 * (ymax_ - ymin_), xlabel);
    text(xmax_ + 0.01 * (xmax_ - xmin_), 0.5 * (ymin_ + ymax_), ylabel);
  }

  void save(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("SvgCanvas: cannot open " + path);
    out << body_.str() << "</svg>\n";
  }

 private:
  double xmin_, xmax_, ymin_, ymax_;
  int w_, h_;
  double margin_ = 48.0;
  std::ostringstream body_;
};

inline void write_region_svg(const std::string& path, const std::vector<RegionCurveRow>& rows) {
  SvgCanvas svg(0.0, 2.0, -0.05, 1.1, 720, 440);
  std::vector<double> xs, sel, old_b, half;
  std::vector<double> xl, yl, xm, ym, xr, yr;
  for (const auto& r : rows) {
    xs.push_back(r.beta);
    sel.push_back(r.selected);
    old_b.push_back(r.old_bound);
    half.push_back(r.half_beta);
    if (r.beta <= kBreakLeft) {
      xl.push_back(r.beta);
      yl.push_back(r.left);
    }
    if (r.beta >= kBreakLeft && r.beta <= kBreakRight) {
      xm.push_back(r.beta);
      ym.push_back(r.mid);
    }
    if (r.beta >= kBreakRight) {
      xr.push_back(r.beta);
      yr.push_back(r.right);
    }
  }
  svg.filled_region(xs, sel, "gray", 0.5);
  svg.filled_region(xs, old_b, "gray", 0.7);
  svg.filled_region(xs, half, "gray", 0.4);
  svg.polyline(xl, yl, "stroke=\"black\" stroke-width=\"1.5\"");
  svg.polyline(xm, ym, "stroke=\"black\" stroke-width=\"1.5\"");
  svg.polyline(xr, yr, "stroke=\"black\" stroke-width=\"1.5\"");
  svg.polyline(xs, old_b, "stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"8 3 2 3\"");
  svg.polyline(xs, half, "stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"6 4\"");
  svg.hollow_marker(2.0, 0.0);
  svg.axes("beta in (0, 2]", "D = 1 - 2 alpha");
  svg.save(path);
}

}  // namespace nibc
