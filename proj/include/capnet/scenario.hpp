#pragma once

#include <cstdint>

#include "capnet/capacity.hpp"
#include "capnet/engine.hpp"

namespace capnet {

// Family builders. Each prepares a fully runnable Scenario: deployment,
// flows, the family's cell construction, reuse parameters that satisfy the
// guard condition by construction, and precomputed routes. Deployments whose
// draw leaves a route unbuildable are resampled with a counter-derived seed
// (bounded retries, count recorded in the scenario).

struct CellTdmaOptions {
    double kappa_cell = 1.0;  // cell area = kappa * ln n / n
    double guard = 0.4;       // protocol delta
    uint32_t window = 1;      // in-flight packets per flow under saturation
    uint32_t max_retries = 10;
};

Scenario make_cell_tdma_scenario(uint32_t n, uint64_t seed, const CellTdmaOptions& opt = {});

struct HighwayOptions {
    double cell_side = 1.5;   // density-1 units
    double kappa = 1.0;       // slab height = kappa * ln(n) cell rows
    double alpha = 3.0;       // attenuation exponent
    double absorption = 0.0;  // gamma
    double noise = 1e-4;
    double power = 1.0;
    double beta_floor = 0.02;  // smallest admissible per-phase threshold
    uint32_t window = 1;
    uint32_t max_retries = 10;
};

Scenario make_highway_scenario(uint32_t n, uint64_t seed, const HighwayOptions& opt = {});

struct MobileOptions {
    double theta = 0.2;  // transmitter density
    double alpha = 4.0;
    double processing_gain = 1.0;
    double beta = 1.0;
    double noise = 1e-9;
    double power = 1.0;
    uint32_t relay_queue_cap = 1;
    uint32_t verify_limit = 600;  // re-verify emitted sets only up to this n
};

Scenario make_mobile_scenario(uint32_t n, uint64_t seed, const MobileOptions& opt = {});

struct MulticastOptions {
    double kappa_cell = 3.2;  // coarse grid: cell side = sqrt(kappa ln n / n) * a
    double guard = 0.2;
    uint32_t n_s = 64;  // multicast sources
    uint32_t window = 2;
    uint32_t max_retries = 10;
};

Scenario make_multicast_scenario(uint32_t n, uint32_t l, uint64_t seed,
                                 const MulticastOptions& opt = {});

struct HybridOptions {
    HybridRegime regime = HybridRegime::ShrunkRange;
    double range_coeff = 1.4;  // shrunk-range: r = coeff / sqrt(M)
    double kappa_cell = 1.25;  // fixed-range cell sizing (as cell-tdma)
    double guard = 0.4;
    InfraMode infra_mode = InfraMode::Grid;
    // Fair-share injection cap per flow as a multiple of M/(l^2 n), the
    // equal split of the backbone bottleneck. Keeps in-range shortcut pairs
    // from dominating the aggregate. 0 disables.
    double fair_rate_headroom = 1.5;
    uint32_t window = 4;  // deep enough that downlink queues stay saturated
    uint32_t max_retries = 10;
};

Scenario make_hybrid_scenario(uint32_t n, uint32_t m, uint64_t seed,
                              const HybridOptions& opt = {});

// Horizon rules: static families max(2e4, 50*sqrt(n ln n)); mobile needs the
// relay pool to equilibrate, max(4e4, 80n).
uint64_t default_horizon(SchedulerId family, uint32_t n);

}  // namespace capnet
