#include "airink/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "airink/error.hpp"

namespace airink {
namespace {

std::size_t repetition_columns(const AccuracyReport& report) {
  std::size_t n = 0;
  for (const auto& row : report.rows) n = std::max(n, row.accuracies.size());
  return n;
}

std::vector<std::vector<std::string>> cells(const AccuracyReport& report) {
  const auto reps = repetition_columns(report);
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> header{"task", "mode", "budget"};
  for (std::size_t r = 1; r <= reps; ++r) header.push_back("rep" + std::to_string(r));
  header.push_back("mean");
  out.push_back(std::move(header));
  for (const auto& row : report.rows) {
    std::vector<std::string> line{std::to_string(row.task_id), std::string(mode_name(row.mode)),
                                  std::to_string(row.budget)};
    for (std::size_t r = 0; r < reps; ++r) {
      line.push_back(r < row.accuracies.size() ? format_percent(row.accuracies[r]) : "");
    }
    line.push_back(format_percent(row.mean()));
    out.push_back(std::move(line));
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

double ReportRow::mean() const {
  if (accuracies.empty()) return 0.0;
  return std::accumulate(accuracies.begin(), accuracies.end(), 0.0) /
         static_cast<double>(accuracies.size());
}

std::string format_percent(double value) {
  if (!std::isfinite(value)) throw NumericalError("non-finite percentage");
  // The small offset absorbs representation error such as 56.78 * 100 = 5677.999...
  const auto hundredths = static_cast<long long>(std::floor(std::abs(value) * 100.0 + 1e-6));
  std::ostringstream out;
  if (value < 0 && hundredths != 0) out << '-';
  out << hundredths / 100 << '.' << (hundredths % 100 < 10 ? "0" : "") << hundredths % 100;
  return out.str();
}

std::string report_csv(const AccuracyReport& report) {
  std::string out;
  for (const auto& line : cells(report)) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) out += ',';
      out += line[i];
    }
    out += '\n';
  }
  return out;
}

std::string report_table(const AccuracyReport& report) {
  const auto grid = cells(report);
  std::vector<std::size_t> width(grid.front().size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const auto& line = grid[l];
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) text += "  ";
      const auto pad = std::string(width[i] - line[i].size(), ' ');
      // Text columns left-aligned, numbers right-aligned.
      text += i == 1 ? line[i] + pad : pad + line[i];
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out += text + '\n';
    if (l == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
    }
  }
  return out;
}

void emit_report(const AccuracyReport& report, const std::filesystem::path& path) {
  if (report.rows.empty()) throw EmptyReport("report has no rows");
  auto csv = path;
  auto txt = path;
  csv.replace_extension(".csv");
  txt.replace_extension(".txt");
  write_file(csv, report_csv(report));
  write_file(txt, report_table(report));
}

}  // namespace airink
