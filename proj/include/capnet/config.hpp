#pragma once

#include <optional>
#include <string>
#include <vector>

#include "capnet/experiments.hpp"

namespace capnet {

// Parsed and validated key = value config with [section] headers. Unknown
// keys are rejected with the nearest valid key suggested; all errors are
// reported together (ConfigError carries the full list).
struct RunConfig {
    // [deployment]
    uint32_t n = 0;  // required
    std::optional<double> area_side;
    std::optional<double> margin;  // connectivity margin f(n); default ln ln n
    uint32_t m = 0;                // infrastructure count
    InfraMode infra_mode = InfraMode::Grid;

    // [scheduler]
    SchedulerId family = SchedulerId::CellTdmaStraightline;  // required key
    CellTdmaOptions cell_tdma;
    HighwayOptions highway;
    MobileOptions mobile;
    MulticastOptions multicast;
    HybridOptions hybrid;

    // [flows]
    FlowKind flow_kind = FlowKind::Unicast;
    uint32_t n_s = 64;
    uint32_t l = 8;

    // [engine]
    std::optional<uint64_t> horizon;
    double warmup_frac = 0.2;
    Injection injection;
    uint64_t seed = 1;

    // [experiment]
    std::optional<SweepParam> sweep_param;
    std::vector<uint32_t> sweep_values;
    uint32_t repetitions = 5;
    std::optional<double> target_slope;
    std::optional<double> tolerance;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// Scenario assembled from a validated config.
Scenario scenario_from_config(const RunConfig& cfg);

// Sweep spec assembled from a validated config ([experiment] required).
SweepSpec sweep_spec_from_config(const RunConfig& cfg);

uint64_t horizon_from_config(const RunConfig& cfg);

}  // namespace capnet
