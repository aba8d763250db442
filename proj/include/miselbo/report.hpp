#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace miselbo {

inline constexpr std::string_view kVersion = "0.1.0";

struct Provenance {
  std::uint64_t seed = 0;
  std::string version{kVersion};
  // Informational only; never serialized, so identical runs emit
  // byte-identical files.
  std::string timestamp;
};

struct ReportRow {
  std::string setting;
  double swept_value = 0.0;
  std::size_t S = 0;
  std::size_t L = 0;
  std::string estimator;
  double mean = 0.0;
  double std = 0.0;
  std::string verdict;  // only populated by verify reports
};

struct Report {
  std::vector<ReportRow> rows;
  Provenance provenance;
  bool with_verdict = false;
};

// Deterministic CSV: "# key=value" provenance comments, a header row, then
// rows sorted by (setting, swept_value, S, L, estimator). Column order is
// setting, swept_value, S, L, estimator, mean, std [, verdict].
void write_report_csv(const Report& report, std::ostream& out);
void write_report_csv(const Report& report, const std::string& path);

Report read_report_csv(std::istream& in);
Report read_report_csv(const std::string& path);

// Fixed-format float used across CSV and SVG output.
std::string format_number(double value);

}  // namespace miselbo
