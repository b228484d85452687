#pragma once

// CSV and SVG output for traces and summaries.

#include <filesystem>
#include <string>
#include <vector>

#include "tvrls/experiments.hpp"

namespace tvrls {

/// printf "%.17g".
std::string format_double(double x);

void emit_csv(const ErrorTrace& trace, const std::filesystem::path& path);
void emit_csv(const McSummary& summary, const std::filesystem::path& path);
void emit_csv(const TimingSummary& summary, const std::filesystem::path& path);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  /// Optional shaded band; empty or the same length as y.
  std::vector<double> lo;
  std::vector<double> hi;
  bool dashed = false;
  std::string color;  // empty: palette by position
};

struct PlotSpec {
  std::string title;
  std::string x_label = "k";
  std::string y_label = "error norm";
  bool log_y = true;
  /// Values below this are clamped on a log axis.
  double log_floor = 1e-16;
  int width = 800;
  int height = 500;
};

PlotSeries series_from(const ErrorTrace& trace);
PlotSeries series_from(const McSummary& summary);

/// Line chart. Throws ConfigError on an empty series list, IoError on write failure.
void emit_svg(const std::vector<PlotSeries>& series, const std::filesystem::path& path,
              const PlotSpec& spec);
/// Grouped bar chart of mean step time per estimator and phase, with interval whiskers.
void emit_timing_svg(const TimingSummary& summary, const std::filesystem::path& path,
                     const std::string& title);

}  // namespace tvrls
