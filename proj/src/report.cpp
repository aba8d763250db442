#include "miselbo/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "miselbo/errors.hpp"

namespace miselbo {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

}  // namespace

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

void write_report_csv(const Report& report, std::ostream& out) {
  std::vector<ReportRow> rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.setting, a.swept_value, a.S, a.L, a.estimator) <
           std::tie(b.setting, b.swept_value, b.S, b.L, b.estimator);
  });

  out << "# seed=" << report.provenance.seed << "\n";
  out << "# version=" << report.provenance.version << "\n";
  out << "setting,swept_value,S,L,estimator,mean,std";
  if (report.with_verdict) out << ",verdict";
  out << "\n";
  for (const auto& row : rows) {
    out << row.setting << ',' << format_number(row.swept_value) << ',' << row.S << ',' << row.L
        << ',' << row.estimator << ',' << format_number(row.mean) << ','
        << format_number(row.std);
    if (report.with_verdict) out << ',' << row.verdict;
    out << "\n";
  }
}

void write_report_csv(const Report& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  write_report_csv(report, out);
}

Report read_report_csv(std::istream& in) {
  Report report;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        const std::string key = line.substr(2, eq - 2);
        const std::string value = line.substr(eq + 1);
        if (key == "seed") report.provenance.seed = std::stoull(value);
        if (key == "version") report.provenance.version = value;
      }
      continue;
    }
    const auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.size() < 7 || fields[0] != "setting")
        throw UsageError("not a report CSV: unexpected header '" + line + "'");
      report.with_verdict = fields.size() > 7 && fields[7] == "verdict";
      header_seen = true;
      continue;
    }
    if (fields.size() < 7) throw UsageError("malformed report row '" + line + "'");
    ReportRow row;
    row.setting = fields[0];
    row.swept_value = std::stod(fields[1]);
    row.S = std::stoull(fields[2]);
    row.L = std::stoull(fields[3]);
    row.estimator = fields[4];
    row.mean = std::stod(fields[5]);
    row.std = std::stod(fields[6]);
    if (report.with_verdict && fields.size() > 7) row.verdict = fields[7];
    report.rows.push_back(std::move(row));
  }
  if (!header_seen) throw UsageError("empty report CSV");
  return report;
}

Report read_report_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return read_report_csv(in);
}

}  // namespace miselbo
