#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "protaudit/corpus.hpp"
#include "protaudit/metrics.hpp"
#include "protaudit/probe.hpp"
#include "protaudit/regression.hpp"
#include "protaudit/serialize.hpp"

namespace protaudit {

inline constexpr int kReportSchemaVersion = 1;

// Report numbers are rounded to this grid so the file does not depend on the
// last bits of floating-point reductions.
double RoundForReport(double v);

// Shortest decimal that reads back as `v`.
std::string FormatNumber(double v);

struct ProbeEntry {
  std::string name;
  std::optional<ProbeResult> result;
  std::string note;  // why the probe did not run
};

struct ReportInputs {
  Json manifest;  // without timestamps
  StatsSummary stats;
  std::size_t no_character_stories = 0;
  std::vector<MetricSummary> summaries;
  std::string pooling = "story";
  std::optional<RegressionResult> regression;
  std::string regression_note;
  std::vector<ProbeEntry> probes;
  std::size_t inference_failures = 0;
};

Json BuildReport(const ReportInputs& inputs);

// Markdown projection of a report built by BuildReport.
std::string RenderMarkdown(const Json& report);

struct FigureOutput {
  std::vector<std::string> files;  // names relative to the output directory
  std::vector<std::string> notes;
};

// portrayal.svg and affect.svg (grouped bars of median z-scores) and
// regression.svg (one circle per category, area proportional to
// |coefficient|), each with a CSV twin holding the plotted numbers.
FigureOutput EmitFigures(const Json& report, const std::filesystem::path& out_dir);

}  // namespace protaudit
