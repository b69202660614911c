#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "capnet/cellgrid.hpp"
#include "capnet/deploy.hpp"
#include "capnet/interference.hpp"
#include "capnet/routing.hpp"
#include "capnet/scheduling.hpp"

namespace capnet {

enum class SchedulerId : uint8_t {
    CellTdmaStraightline,
    Highway4Phase,
    TwoHopMobile,
    MulticastCds,
    Hybrid,
    ManualGreedy,  // explicit routes + greedy packer; used by tests and probes
};

const char* scheduler_name(SchedulerId id);

struct Injection {
    enum class Mode : uint8_t { Saturated, FixedRate };
    Mode mode = Mode::Saturated;
    uint32_t window = 1;  // max in-flight packets per flow under saturation
    double rate = 0.0;    // packets/slot/flow for fixed-rate
    // Fair-share token cap on injections (0 = off). Implements the
    // equal-division scheduler class: no flow may inject faster than this,
    // so short-route flows cannot grab unbounded slot share.
    double rate_cap = 0.0;
};

// A fully prepared runnable scenario. Builders in scenario.hpp fill the
// family-specific members; the engine never re-derives them.
struct Scenario {
    Deployment deployment;
    MobilityModel mobility;
    FlowSet flows;
    InterferenceModel interference;
    SchedulerId scheduler = SchedulerId::CellTdmaStraightline;
    double link_rate = 1.0;  // W, reporting scale; one packet per link per slot
    Injection injection;

    CellGraph cells;
    TdmaSchedule tdma;                      // single-schedule cell families
    std::vector<Route> routes;              // per flow, static families
    HighwaySystem highways;                 // Highway4Phase diagnostics

    // Highway4Phase only: one schedule and admission threshold per phase.
    std::array<TdmaSchedule, 4> phase_tdma{};
    std::array<double, 4> phase_beta{};

    TwoHopParams two_hop;  // TwoHopMobile only

    bool verify_every_slot = true;
    double warmup_frac = 0.2;
    uint32_t deployment_retries = 0;
    double connectivity_range = 0.0;  // critical_range(n, margin), reported
    std::vector<std::pair<std::string, uint64_t>> derived_seeds;
};

struct RunTrace {
    uint64_t horizon = 0;
    uint64_t warmup = 0;
    uint32_t n_ordinary = 0;
    uint64_t seed = 0;

    std::vector<uint32_t> per_slot_active;  // Y_t
    std::vector<uint64_t> in_transit;       // q_t

    std::vector<uint64_t> delivered_per_flow;         // full run
    std::vector<uint64_t> delivered_per_flow_window;  // post-warmup
    uint64_t delivered_total = 0;
    uint64_t delivered_window = 0;
    uint64_t hops_delivered_total = 0;
    uint64_t hops_delivered_window = 0;
    std::map<uint32_t, uint64_t> hop_histogram;  // h -> delivered packets

    uint64_t sum_Yt = 0;
    uint64_t sum_Yt_window = 0;
    uint32_t max_Yt = 0;
    uint64_t inflight_transmissions_end = 0;  // conservation remainder

    // Sigma_t Y_t == Sigma_delivered h + in-flight transmissions, exactly
    bool conservation_ok() const {
        return sum_Yt == hops_delivered_total + inflight_transmissions_end;
    }
};

struct StabilityVerdict {
    bool stable = false;
    double slope = 0.0;    // packets per slot, least squares on q_t
    double epsilon = 0.0;  // threshold used
};

struct Metrics {
    double eta = 0.0;          // delivered packets/slot in window * W
    double lambda_min = 0.0;   // per-flow rates * W
    double lambda_mean = 0.0;
    double lambda_max = 0.0;
    double Y = 0.0;            // mean Y_t over window
    double k = 0.0;            // hops per delivered packet
    double residual = 0.0;     // |eta - Y*W/k| / eta
    double fairness_ratio = 0.0;  // lambda_max / lambda_min; 0 when min == 0
    bool stable = false;
    double q_slope = 0.0;
    uint64_t delivered = 0;    // window deliveries
    double W = 1.0;
};

RunTrace run(const Scenario& scenario, uint64_t T, uint64_t seed);

// Least-squares slope of q_t over the post-warmup window; stable iff
// slope <= eps_per_node * n packets/slot.
StabilityVerdict stability_check(const RunTrace& trace, double eps_per_node = 1e-3);

Metrics measure(const RunTrace& trace, double W);

// Largest fixed injection rate (within multiplicative tol) that keeps the
// scenario stable; bisects [0, 1] packets/slot/flow.
double binary_search_throughput(const Scenario& scenario, uint64_t T, double tol, uint64_t seed);

}  // namespace capnet
