#pragma once

#include <optional>
#include <string>
#include <vector>

namespace colorref::svg {

/// Escapes &, <, >, " and ' for SVG text and attribute values.
std::string escape(const std::string& text);

struct BarSeries {
  std::string name;
  std::string fill;  // CSS color
  std::vector<std::optional<double>> values;  // one per category; absent bars are skipped
  std::vector<std::optional<std::pair<double, double>>> intervals;  // optional error bars
};

/// Grouped vertical bar chart.
std::string bar_chart(const std::string& title, const std::string& y_label, const std::vector<std::string>& categories,
                      const std::vector<BarSeries>& series);

}  // namespace colorref::svg
