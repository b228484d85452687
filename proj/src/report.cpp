#include "tvrls/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tvrls/error.hpp"

namespace tvrls {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  return colors[i % std::size(colors)];
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Frame {
  double left = 70, right = 160, top = 40, bottom = 50;
  double w, h;
  double x0, x1, y0, y1;
  bool log_y;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (w - left - right); }
  double py(double y) const {
    const double v = log_y ? std::log10(y) : y;
    return h - bottom - (v - y0) / (y1 - y0) * (h - top - bottom);
  }
};

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void emit_csv(const ErrorTrace& trace, const fs::path& path) {
  auto out = open_out(path);
  out << "k,error_norm,lambda_min,r_max,step_ms\n";
  for (const auto& r : trace.rows) {
    out << r.k << ',' << format_double(r.error_norm) << ',' << format_double(r.lambda_min)
        << ',' << format_double(r.r_max) << ',' << format_double(r.step_ms) << '\n';
  }
  finish(out, path);
}

void emit_csv(const McSummary& summary, const fs::path& path) {
  auto out = open_out(path);
  out << "k,mean,ci_lo,ci_hi\n";
  for (const auto& r : summary.rows) {
    out << r.k << ',' << format_double(r.mean) << ',' << format_double(r.ci_lo) << ','
        << format_double(r.ci_hi) << '\n';
  }
  finish(out, path);
}

void emit_csv(const TimingSummary& summary, const fs::path& path) {
  auto out = open_out(path);
  out << "estimator,phase,mean_ms,ci_lo_ms,ci_hi_ms\n";
  for (const auto& r : summary.rows) {
    out << to_string(r.kind) << ',' << r.phase << ',' << format_double(r.mean_ms) << ','
        << format_double(r.ci_lo_ms) << ',' << format_double(r.ci_hi_ms) << '\n';
  }
  finish(out, path);
}

PlotSeries series_from(const ErrorTrace& trace) {
  PlotSeries s;
  s.label = std::string(label(trace.kind)) + (trace.mode == DataMode::pe ? " (PE)" : " (non-PE)");
  s.dashed = trace.mode == DataMode::non_pe;
  for (const auto& r : trace.rows) {
    s.x.push_back(static_cast<double>(r.k));
    s.y.push_back(r.error_norm);
  }
  return s;
}

PlotSeries series_from(const McSummary& summary) {
  PlotSeries s;
  s.label = label(summary.kind);
  for (const auto& r : summary.rows) {
    s.x.push_back(static_cast<double>(r.k));
    s.y.push_back(r.mean);
    s.lo.push_back(r.ci_lo);
    s.hi.push_back(r.ci_hi);
  }
  return s;
}

void emit_svg(const std::vector<PlotSeries>& series, const fs::path& path, const PlotSpec& spec) {
  if (series.empty()) throw Error(ErrorKind::config, "emit_svg: no series to plot");

  Frame f;
  f.w = spec.width;
  f.h = spec.height;
  f.log_y = spec.log_y;
  const auto yval = [&](double y) { return spec.log_y ? std::max(y, spec.log_floor) : y; };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (double x : s.x) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    auto take = [&](const std::vector<double>& v) {
      for (double y : v) {
        if (!std::isfinite(y)) continue;
        const double t = yval(y);
        ymin = std::min(ymin, t);
        ymax = std::max(ymax, t);
      }
    };
    take(s.y);
    take(s.lo);
    take(s.hi);
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
  if (!std::isfinite(ymin)) ymin = spec.log_y ? 1e-3 : 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (spec.log_y) {
    f.y0 = std::floor(std::log10(ymin));
    f.y1 = std::ceil(std::log10(ymax));
    if (f.y1 == f.y0) f.y1 = f.y0 + 1;
  } else {
    f.y0 = ymin;
    f.y1 = ymax == ymin ? ymin + 1 : ymax;
  }
  f.x0 = xmin;
  f.x1 = xmax;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
    << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    o << "<text x=\"" << fmt(f.w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(spec.title) << "</text>\n";
  }

  // Axes and ticks.
  const double plot_right = f.w - f.right;
  const double plot_bottom = f.h - f.bottom;
  o << "<rect x=\"" << fmt(f.left) << "\" y=\"" << fmt(f.top) << "\" width=\""
    << fmt(plot_right - f.left) << "\" height=\"" << fmt(plot_bottom - f.top)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0;
    const double x = f.px(xv);
    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(plot_bottom) << "\" x2=\"" << fmt(x)
      << "\" y2=\"" << fmt(plot_bottom + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(plot_bottom + 18)
      << "\" text-anchor=\"middle\">" << tick_label(std::round(xv * 100) / 100) << "</text>\n";
  }
  const int decades = static_cast<int>(f.y1 - f.y0);
  const int ysteps = spec.log_y ? decades : 5;
  const int ystride = spec.log_y ? std::max(1, decades / 8) : 1;
  for (int i = 0; i <= ysteps; i += ystride) {
    const double v = f.y0 + (f.y1 - f.y0) * i / ysteps;
    const double y = plot_bottom - (v - f.y0) / (f.y1 - f.y0) * (plot_bottom - f.top);
    o << "<line x1=\"" << fmt(f.left - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(f.left)
      << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << fmt(f.left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(plot_right)
      << "\" y2=\"" << fmt(y) << "\" stroke=\"#e0e0e0\"/>\n";
    const std::string text = spec.log_y ? "1e" + std::to_string(static_cast<int>(std::lround(v)))
                                        : tick_label(v);
    o << "<text x=\"" << fmt(f.left - 8) << "\" y=\"" << fmt(y + 4)
      << "\" text-anchor=\"end\">" << text << "</text>\n";
  }
  o << "<text x=\"" << fmt((f.left + plot_right) / 2) << "\" y=\"" << fmt(f.h - 10)
    << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << fmt((f.top + plot_bottom) / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

  // Bands first so lines stay on top.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const std::string color = s.color.empty() ? palette(i) : s.color;
    if (s.lo.size() != s.y.size() || s.hi.size() != s.y.size() || s.y.empty()) continue;
    o << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      o << fmt(f.px(s.x[j])) << ',' << fmt(f.py(yval(s.hi[j]))) << ' ';
    }
    for (std::size_t j = s.x.size(); j-- > 0;) {
      o << fmt(f.px(s.x[j])) << ',' << fmt(f.py(yval(s.lo[j]))) << ' ';
    }
    o << "\"/>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const std::string color = s.color.empty() ? palette(i) : s.color;
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (s.dashed) o << " stroke-dasharray=\"6,4\"";
    o << " points=\"";
    const std::size_t count = std::min(s.x.size(), s.y.size());
    for (std::size_t j = 0; j < count; ++j) {
      if (!std::isfinite(s.y[j])) continue;
      o << fmt(f.px(s.x[j])) << ',' << fmt(f.py(yval(s.y[j]))) << ' ';
    }
    o << "\"/>\n";

    const double ly = f.top + 10 + 20.0 * static_cast<double>(i);
    const double lx = plot_right + 12;
    o << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 24)
      << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (s.dashed) o << " stroke-dasharray=\"6,4\"";
    o << "/>\n";
    o << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";

  auto out = open_out(path);
  out << o.str();
  finish(out, path);
}

void emit_timing_svg(const TimingSummary& summary, const fs::path& path,
                     const std::string& title) {
  if (summary.rows.empty()) throw Error(ErrorKind::config, "emit_timing_svg: no timing rows");
  const double w = 640, h = 420, left = 70, right = 20, top = 40, bottom = 70;
  std::vector<EstimatorKind> kinds;
  for (const auto& r : summary.rows) {
    if (std::find(kinds.begin(), kinds.end(), r.kind) == kinds.end()) kinds.push_back(r.kind);
  }
  double ymax = 0.0;
  for (const auto& r : summary.rows) ymax = std::max(ymax, r.ci_hi_ms);
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.1;
  const auto py = [&](double v) { return h - bottom - v / ymax * (h - top - bottom); };
  const double group = (w - left - right) / static_cast<double>(kinds.size());
  const double bar = group * 0.35;
  const char* phases[] = {"fading", "post-cutoff"};
  const char* colors[] = {"#1f77b4", "#ff7f0e"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(w - right)
    << "\" y2=\"" << fmt(py(0)) << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left)
    << "\" y2=\"" << fmt(py(0)) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = ymax * i / 5.0;
    o << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(v) + 4)
      << "\" text-anchor=\"end\">" << tick_label(std::round(v * 1000) / 1000) << "</text>\n";
  }
  o << "<text transform=\"translate(16," << fmt((top + h - bottom) / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">ms per step</text>\n";

  for (std::size_t g = 0; g < kinds.size(); ++g) {
    const double gx = left + group * static_cast<double>(g) + group * 0.15;
    for (int ph = 0; ph < 2; ++ph) {
      const TimingRow* r = summary.find(kinds[g], phases[ph]);
      if (!r) continue;
      const double x = gx + bar * ph;
      o << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(py(r->mean_ms)) << "\" width=\""
        << fmt(bar * 0.9) << "\" height=\"" << fmt(py(0) - py(r->mean_ms)) << "\" fill=\""
        << colors[ph] << "\"/>\n";
      const double cx = x + bar * 0.45;
      o << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(py(r->ci_lo_ms)) << "\" x2=\""
        << fmt(cx) << "\" y2=\"" << fmt(py(r->ci_hi_ms)) << "\" stroke=\"black\"/>\n";
    }
    o << "<text x=\"" << fmt(gx + bar) << "\" y=\"" << fmt(h - bottom + 18)
      << "\" text-anchor=\"middle\">" << label(kinds[g]) << "</text>\n";
  }
  for (int ph = 0; ph < 2; ++ph) {
    const double lx = left + 10 + 130.0 * ph;
    o << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(h - 30) << "\" width=\"14\" height=\"14\" fill=\""
      << colors[ph] << "\"/>\n";
    o << "<text x=\"" << fmt(lx + 20) << "\" y=\"" << fmt(h - 19) << "\">" << phases[ph]
      << "</text>\n";
  }
  o << "</svg>\n";

  auto out = open_out(path);
  out << o.str();
  finish(out, path);
}

}  // namespace tvrls
