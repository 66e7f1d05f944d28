#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qspeed/linalg.hpp"

namespace qspeed {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One row of a fidelity-vs-time curve: the multi-seed best at one grid point.
struct SweepRecord {
  double t_over_tmin = 0.0;
  double t_seconds = 0.0;
  double best_fidelity = 0.0;
  double infidelity = 1.0;
  std::uint64_t seed_used = 0;
  int iterations_run = 0;
};

inline const char* csv_header() {
  return "t_over_tmin,t_seconds,best_fidelity,infidelity,seed_used,iterations_run";
}

inline std::string csv_row(const SweepRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%llu,%d",
                r.t_over_tmin, r.t_seconds, r.best_fidelity, r.infidelity,
                static_cast<unsigned long long>(r.seed_used), r.iterations_run);
  return buf;
}

inline void write_csv(const std::vector<SweepRecord>& records,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << csv_header() << '\n';
  for (const SweepRecord& r : records) out << csv_row(r) << '\n';
  if (!out) throw IoError("write failed on " + path);
}

inline std::vector<SweepRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) {
    throw IoError(path + ": missing or unexpected CSV header");
  }
  std::vector<SweepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SweepRecord r;
    unsigned long long seed = 0;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%llu,%d", &r.t_over_tmin,
                    &r.t_seconds, &r.best_fidelity, &r.infidelity, &seed,
                    &r.iterations_run) != 6) {
      throw IoError(path + ": malformed CSV row: " + line);
    }
    r.seed_used = seed;
    records.push_back(r);
  }
  return records;
}

namespace detail {

struct SvgPanel {
  double x0, y0, w, h;          // plot area in page coordinates
  double xmin, xmax, ymin, ymax;
  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline void svg_axes(std::ostringstream& out, const SvgPanel& p,
                     const std::vector<std::pair<double, std::string>>& xticks,
                     const std::vector<std::pair<double, std::string>>& yticks,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::string& title) {
  out << "<rect x='" << fmt(p.x0) << "' y='" << fmt(p.y0) << "' width='"
      << fmt(p.w) << "' height='" << fmt(p.h)
      << "' fill='white' stroke='#333'/>\n";
  for (const auto& [v, label] : xticks) {
    const double x = p.px(v);
    out << "<line x1='" << fmt(x) << "' y1='" << fmt(p.y0) << "' x2='" << fmt(x)
        << "' y2='" << fmt(p.y0 + p.h) << "' stroke='#ddd'/>\n";
    out << "<text x='" << fmt(x) << "' y='" << fmt(p.y0 + p.h + 16)
        << "' text-anchor='middle' font-size='11'>" << label << "</text>\n";
  }
  for (const auto& [v, label] : yticks) {
    const double y = p.py(v);
    out << "<line x1='" << fmt(p.x0) << "' y1='" << fmt(y) << "' x2='"
        << fmt(p.x0 + p.w) << "' y2='" << fmt(y) << "' stroke='#ddd'/>\n";
    out << "<text x='" << fmt(p.x0 - 6) << "' y='" << fmt(y + 4)
        << "' text-anchor='end' font-size='11'>" << label << "</text>\n";
  }
  out << "<text x='" << fmt(p.x0 + p.w / 2) << "' y='" << fmt(p.y0 + p.h + 34)
      << "' text-anchor='middle' font-size='12'>" << xlabel << "</text>\n";
  out << "<text x='" << fmt(p.x0 - 52) << "' y='" << fmt(p.y0 + p.h / 2)
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 "
      << fmt(p.x0 - 52) << ' ' << fmt(p.y0 + p.h / 2) << ")'>" << ylabel
      << "</text>\n";
  out << "<text x='" << fmt(p.x0 + p.w / 2) << "' y='" << fmt(p.y0 - 8)
      << "' text-anchor='middle' font-size='13'>" << title << "</text>\n";
}

inline void svg_series(std::ostringstream& out, const SvgPanel& p,
                       const std::vector<double>& xs,
                       const std::vector<double>& ys, const char* color) {
  out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << fmt(p.px(xs[i])) << ',' << fmt(p.py(ys[i])) << ' ';
  }
  out << "'/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << "<circle cx='" << fmt(p.px(xs[i])) << "' cy='" << fmt(p.py(ys[i]))
        << "' r='2.4' fill='" << color << "'/>\n";
  }
}

}  // namespace detail

// Renders a fidelity-vs-time SVG: top panel linear fidelity in [0,1], bottom
// panel infidelity on a log axis with the display floor clamped at 1e-12.
inline void write_svg(const std::vector<SweepRecord>& records,
                      const std::string& path) {
  if (records.empty()) throw std::invalid_argument("write_svg: no records");
  std::vector<double> xs, fs, logr;
  for (const SweepRecord& r : records) {
    xs.push_back(r.t_over_tmin);
    fs.push_back(std::min(1.0, std::max(0.0, r.best_fidelity)));
    logr.push_back(std::log10(std::max(r.infidelity, 1e-12)));
  }
  double xmin = xs.front(), xmax = xs.front();
  for (double x : xs) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }

  detail::SvgPanel top{70, 30, 620, 200, xmin, xmax, 0.0, 1.0};
  detail::SvgPanel bottom{70, 310, 620, 200, xmin, xmax, -12.0, 0.0};

  std::vector<std::pair<double, std::string>> xticks;
  for (int i = 0; i <= 4; ++i) {
    const double v = xmin + (xmax - xmin) * i / 4.0;
    xticks.emplace_back(v, detail::fmt(v));
  }
  std::vector<std::pair<double, std::string>> fticks = {
      {0.0, "0"}, {0.25, "0.25"}, {0.5, "0.5"}, {0.75, "0.75"}, {1.0, "1"}};
  std::vector<std::pair<double, std::string>> rticks = {{0.0, "1"},
                                                        {-3.0, "1e-3"},
                                                        {-6.0, "1e-6"},
                                                        {-9.0, "1e-9"},
                                                        {-12.0, "1e-12"}};

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='720' height='570' "
         "viewBox='0 0 720 570'>\n<rect width='720' height='570' fill='white'/>\n";
  detail::svg_axes(out, top, xticks, fticks, "T / T_min", "best fidelity",
                   "Gate fidelity vs pulse time");
  detail::svg_series(out, top, xs, fs, "#1f6fb4");
  // 0.999 threshold guide
  out << "<line x1='" << detail::fmt(top.px(xmin)) << "' y1='"
      << detail::fmt(top.py(0.999)) << "' x2='" << detail::fmt(top.px(xmax))
      << "' y2='" << detail::fmt(top.py(0.999))
      << "' stroke='#b41f1f' stroke-dasharray='4 3'/>\n";
  detail::svg_axes(out, bottom, xticks, rticks, "T / T_min", "infidelity",
                   "Infidelity (log scale)");
  detail::svg_series(out, bottom, xs, logr, "#b41f1f");
  out << "</svg>\n";

  std::ofstream file(path);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file << out.str();
  if (!file) throw IoError("write failed on " + path);
}

enum class ReportFormat { csv, svg };

inline void emit_report(const std::vector<SweepRecord>& records,
                        ReportFormat format, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("emit_report: no records");
  if (format == ReportFormat::csv) {
    write_csv(records, path);
  } else {
    write_svg(records, path);
  }
}

}  // namespace qspeed
