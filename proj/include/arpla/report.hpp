// SPDX-License-Identifier: Apache-2.0

// Plot-ready report output. The schema is documented in README.md and
// versioned by RunReport::kSchemaVersion.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "arpla/analysis.hpp"
#include "arpla/scenario.hpp"

namespace arpla {

enum class ReportFormat { Csv, JsonLines };

ReportFormat report_format_from_string(const std::string& s);

/// Number of "summary" rows in the CSV form, independent of the report.
int csv_summary_rows();

/// Throws ConfigError when the ROC is empty; TraceError on I/O failure.
void emit_report(const RunReport& report, ReportFormat format, const std::filesystem::path& path);

/// Reads back the summary and ROC of a json-lines report (scores and
/// posterior samples included).
RunReport read_report_jsonl(const std::filesystem::path& path);

struct CurveRecord {
    int t = 0;
    double p_fa = 0.0;
    double p_d = 0.0;
    std::string source;  // "analytic" or "monte-carlo"
};

void write_curves_jsonl(const std::filesystem::path& path, const std::vector<CurveRecord>& records);

}  // namespace arpla
