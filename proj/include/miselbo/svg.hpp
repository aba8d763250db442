#pragma once

#include <string>
#include <vector>

#include "miselbo/report.hpp"

namespace miselbo {

enum class PlotKind {
  kCurve,    // one polyline per (estimator, L) series
  kOverlay,  // same, with jsd series drawn last and emphasized
};

PlotKind parse_plot_kind(std::string_view name);

// Deterministic static SVG: x = swept_value, y = mean, one polyline per
// series, series sorted by name. An optional estimator filter narrows the
// selection; UsageError on an empty selection, listing the series present
// in the report.
std::string render_plot_svg(const Report& report, PlotKind kind,
                            const std::vector<std::string>& estimator_filter = {});

void emit_plot(const Report& report, PlotKind kind, const std::string& path,
               const std::vector<std::string>& estimator_filter = {});

}  // namespace miselbo
