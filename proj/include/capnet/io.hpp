#pragma once

#include <string>

#include "capnet/capacity.hpp"
#include "capnet/engine.hpp"

#include <json.hpp>

namespace capnet {

inline constexpr int kTraceVersion = 1;

// (slot, Y_t, q_t) rows; schema carried by the summary's trace_version field.
std::string trace_to_csv(const RunTrace& trace);

nlohmann::json metrics_to_json(const Metrics& m);
Metrics metrics_from_json(const nlohmann::json& j);

nlohmann::json bound_report_to_json(const BoundReport& r);

// Full run summary: scenario echo, derived seeds, metrics, conservation
// check. This is the cmd_run output whose bytes the determinism criterion
// compares.
nlohmann::json run_summary_json(const Scenario& sc, const RunTrace& trace, const Metrics& m);

}  // namespace capnet
