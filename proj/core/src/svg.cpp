#include "colorref/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace colorref::svg {

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * p >= v) return m * p;
  }
  return 10.0 * p;
}

}  // namespace

std::string bar_chart(const std::string& title, const std::string& y_label, const std::vector<std::string>& categories,
                      const std::vector<BarSeries>& series) {
  const double width = 640, height = 400;
  const double left = 70, right = 20, top = 50, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double max_v = 0.0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (s.values[i]) max_v = std::max(max_v, *s.values[i]);
      if (i < s.intervals.size() && s.intervals[i]) max_v = std::max(max_v, s.intervals[i]->second);
    }
  }
  const double y_max = nice_ceiling(max_v);
  auto y = [&](double v) { return top + plot_h * (1.0 - v / y_max); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
      << "</text>\n";
  out << "<text transform=\"translate(18," << top + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label) << "</text>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = y_max * t / 5.0;
    out << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\"" << num(y(v)) << "\" y2=\"" << num(y(v))
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << num(y(v) + 4) << "\" text-anchor=\"end\">" << num(v)
        << "</text>\n";
  }
  const double group_w = categories.empty() ? plot_w : plot_w / static_cast<double>(categories.size());
  const double bar_w = series.empty() ? 0.0 : group_w * 0.8 / static_cast<double>(series.size());
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = left + group_w * static_cast<double>(c);
    out << "<text x=\"" << num(gx + group_w / 2) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
        << escape(categories[c]) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
      const auto& ser = series[s];
      if (c >= ser.values.size() || !ser.values[c]) continue;
      const double x = gx + group_w * 0.1 + bar_w * static_cast<double>(s);
      const double v = *ser.values[c];
      out << "<rect x=\"" << num(x) << "\" y=\"" << num(y(v)) << "\" width=\"" << num(bar_w) << "\" height=\""
          << num(top + plot_h - y(v)) << "\" fill=\"" << escape(ser.fill) << "\"><title>" << escape(ser.name) << ": "
          << num(v) << "</title></rect>\n";
      if (c < ser.intervals.size() && ser.intervals[c]) {
        const double cx = x + bar_w / 2;
        out << "<line x1=\"" << num(cx) << "\" x2=\"" << num(cx) << "\" y1=\"" << num(y(ser.intervals[c]->first))
            << "\" y2=\"" << num(y(ser.intervals[c]->second)) << "\" stroke=\"black\"/>\n";
      }
    }
  }
  out << "<line x1=\"" << left << "\" x2=\"" << left << "\" y1=\"" << top << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\"" << top + plot_h << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double lx = left + 10 + 130 * static_cast<double>(s);
    const double ly = height - 18;
    out << "<rect x=\"" << lx << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\""
        << escape(series[s].fill) << "\"/>\n";
    out << "<text x=\"" << lx + 16 << "\" y=\"" << ly << "\">" << escape(series[s].name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace colorref::svg
