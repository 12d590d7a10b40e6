#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "airink/ink.hpp"

namespace airink {

struct ReportRow {
  int task_id = 0;
  MovementMode mode = MovementMode::both;
  std::size_t budget = 0;
  std::vector<double> accuracies;  // percent, one per repetition

  /// Full-precision arithmetic mean of the repetition accuracies.
  double mean() const;
};

struct AccuracyReport {
  std::vector<ReportRow> rows;
  std::map<std::string, std::string> metadata;
};

/// Two-decimal display of a percentage. Digits past the second decimal are
/// dropped, not rounded.
std::string format_percent(double value);

/// `task,mode,budget,rep1..repN,mean`, one line per row.
std::string report_csv(const AccuracyReport& report);
/// Aligned plain-text table of the same values.
std::string report_table(const AccuracyReport& report);

/// Writes `<stem>.csv` and `<stem>.txt` (the path's extension is replaced).
/// Throws EmptyReport for a report without rows, IoError when unwritable.
void emit_report(const AccuracyReport& report, const std::filesystem::path& path);

}  // namespace airink
