#include "miselbo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "miselbo/errors.hpp"

namespace miselbo {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 690.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 430.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Series {
  std::string name;
  bool emphasized = false;
  std::vector<std::pair<double, double>> points;  // sorted by x
};

std::string series_key(const ReportRow& row) {
  return row.estimator + " L=" + std::to_string(row.L);
}

double rescale(double v, double lo, double hi, double out_lo, double out_hi) {
  if (hi == lo) return 0.5 * (out_lo + out_hi);
  return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
}

}  // namespace

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "curve") return PlotKind::kCurve;
  if (name == "overlay") return PlotKind::kOverlay;
  throw ConfigError("unknown plot kind '" + std::string(name) + "'; valid: curve overlay");
}

std::string render_plot_svg(const Report& report, PlotKind kind,
                            const std::vector<std::string>& estimator_filter) {
  std::map<std::string, Series> by_key;
  std::set<std::string> available;
  for (const auto& row : report.rows) {
    available.insert(row.estimator);
    if (!estimator_filter.empty() &&
        std::find(estimator_filter.begin(), estimator_filter.end(), row.estimator) ==
            estimator_filter.end())
      continue;
    const std::string key = series_key(row);
    auto& series = by_key[key];
    series.name = key;
    series.points.emplace_back(row.swept_value, row.mean);
  }
  if (by_key.empty()) {
    std::string msg = "no series selected; available:";
    for (const auto& name : available) msg += ' ' + name;
    if (available.empty()) msg = "report has no rows to plot";
    throw UsageError(msg);
  }

  std::vector<Series> series;
  for (auto& [key, s] : by_key) {
    std::sort(s.points.begin(), s.points.end());
    if (kind == PlotKind::kOverlay && key.starts_with("jsd")) s.emphasized = true;
    series.push_back(std::move(s));
  }
  // Emphasized series render last so they sit on top of coinciding curves.
  std::stable_sort(series.begin(), series.end(),
                   [](const Series& a, const Series& b) { return a.emphasized < b.emphasized; });

  double x_lo = series[0].points[0].first, x_hi = x_lo;
  double y_lo = series[0].points[0].second, y_hi = y_lo;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  const double y_pad = (y_hi == y_lo) ? 1.0 : 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  std::set<std::string> settings;
  for (const auto& row : report.rows) settings.insert(row.setting);
  std::string title;
  for (const auto& s : settings) title += (title.empty() ? "" : ", ") + s;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
      << kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kBottom << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"" << kBottom + 18
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << format_number(x_lo) << "</text>\n";
  out << "<text x=\"" << kRight - 30 << "\" y=\"" << kBottom + 18
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << format_number(x_hi) << "</text>\n";
  out << "<text x=\"6\" y=\"" << kBottom << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << format_number(y_lo) << "</text>\n";
  out << "<text x=\"6\" y=\"" << kTop + 6 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << format_number(y_hi) << "</text>\n";
  out << "<text x=\"" << 0.5 * (kLeft + kRight) << "\" y=\"" << kBottom + 34
      << "\" font-family=\"sans-serif\" font-size=\"12\">swept value</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
        << (s.emphasized ? 3 : 1.5) << "\"";
    if (s.emphasized) out << " stroke-dasharray=\"6 3\"";
    out << " points=\"";
    for (std::size_t p = 0; p < s.points.size(); ++p) {
      if (p) out << ' ';
      out << format_number(rescale(s.points[p].first, x_lo, x_hi, kLeft, kRight)) << ','
          << format_number(rescale(s.points[p].second, y_lo, y_hi, kBottom, kTop));
    }
    out << "\"/>\n";
    out << "<text x=\"" << kRight - 160 << "\" y=\"" << kTop + 16.0 * static_cast<double>(i)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">" << s.name
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void emit_plot(const Report& report, PlotKind kind, const std::string& path,
               const std::vector<std::string>& estimator_filter) {
  const std::string svg = render_plot_svg(report, kind, estimator_filter);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << svg;
}

}  // namespace miselbo
