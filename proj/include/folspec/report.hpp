#pragma once

#include <string>
#include <vector>

#include "folspec/lab.hpp"
#include "json.hpp"

namespace folspec {

using OrderedJson = nlohmann::ordered_json;

struct ReportMeta {
  std::string timestamp;  // UTC, ISO 8601
  double wall_ms = 0.0;
  std::string tool = "folspec";
  std::string version = "0.1.0";
};

/// Everything one invocation produced: the configuration it ran under, the
/// spectra it computed, the checks it evaluated, and the overall verdict.
struct Report {
  OrderedJson config = OrderedJson::object();
  std::vector<SpectrumRun> runs;
  std::vector<CheckResult> checks;
  std::string verdict;
  ReportMeta meta;
};

OrderedJson report_to_json(const Report& report);

/// Strict reader for the versioned report schema: unknown fields and type
/// mismatches are rejected, and the round trip through report_to_json is
/// lossless.
Report report_from_json(const OrderedJson& doc);
Report parse_report(const std::string& text);

std::string render_json(const Report& report);
/// model,run,index,eigenvalue,residual; one row per computed eigenvalue.
std::string render_csv(const Report& report);

/// Copy with the volatile meta fields blanked, for golden-file comparison.
OrderedJson normalized_for_comparison(OrderedJson doc);

std::string current_timestamp();

}  // namespace folspec
