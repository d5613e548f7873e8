#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vipr/metrics.hpp"

namespace vipr::cli {

struct Series {
  std::string name;
  std::vector<CurvePoint> points;
};

/// Line chart on the unit square with a 0.1-step grid. An optional marker
/// highlights one point (e.g. the F1-optimal threshold).
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series, const CurvePoint* marker = nullptr);

/// 2x2 heat map of the normalized view with raw counts in each cell.
std::string svg_confusion(const std::string& title, const ConfusionMatrix& m);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace vipr::cli
