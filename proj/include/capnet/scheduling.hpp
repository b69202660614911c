#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "capnet/cellgrid.hpp"
#include "capnet/interference.hpp"

namespace capnet {

// Spatial l^2-reuse TDMA over a square cell grid: phase(i,j) = (i mod l)*l +
// (j mod l); cells of equal phase are >= (l-1)*cell_side apart edge to edge.
struct TdmaSchedule {
    double cell_side = 0.0;
    uint32_t reuse_parameter = 1;           // d >= 1
    uint32_t reuse_factor = 4;              // l = 2(d+1)
    uint32_t cycle_length = 16;             // l^2 slots
    uint32_t nx = 0, ny = 0;

    uint32_t phase_of_cell(uint32_t i, uint32_t j) const {
        return (i % reuse_factor) * reuse_factor + (j % reuse_factor);
    }
    uint32_t phase_of(CellIndex c) const { return phase_of_cell(c % nx, c / nx); }
};

TdmaSchedule build_cell_tdma(double area_side, double cell_side, uint32_t d);

// Smallest d such that the guard inequality holds by construction for hops
// of at most hop_len between same-phase cells of side c:
//   adjacent-cell receivers      (l-2)*c >= (1+guard)*hop_len
//   receivers anywhere in range  (l-1)*c - hop_len >= (1+guard)*hop_len
// The second form covers broadcast listeners and long single hops alike.
uint32_t min_reuse_parameter(double cell_side, double hop_len, double guard,
                             bool rx_anywhere_in_range);

// One slot's candidate transmission, supplied by the engine per active cell.
struct TransmitCandidate {
    Link link;
    uint32_t flow_id = 0;
};

// One slot's emitted schedule. `carrying` are links that moved a queued
// packet this slot (Y_t = carrying.size()); harness code may emit active
// links that carried nothing, so both are kept.
struct LinkSet {
    uint64_t slot_index = 0;
    std::vector<Link> active;
    std::vector<Link> carrying;
};

// In each cell whose phase fires at `slot`, at most one candidate transmits.
// The callback returns the cell's head-of-line candidate or nullopt.
using CellCandidateFn = std::function<std::optional<TransmitCandidate>(CellIndex)>;
LinkSet tdma_slot_links(const TdmaSchedule& schedule, uint64_t slot, const CellGraph& cells,
                        const CellCandidateFn& pick);

enum class Tiebreak : uint8_t { LongestQueue, Random };

// Greedy maximal feasible subset. Candidates are taken in queue-length order
// (ties by index) or in seed-shuffled order; a candidate is kept iff the set
// stays feasible with it added. Interference monotonicity makes the result
// maximal in both models.
LinkSet greedy_feasible_set(std::span<const Link> candidates, std::span<const int> queue_lens,
                            std::span<const Point> positions, const InterferenceModel& model,
                            Tiebreak tiebreak, uint64_t seed);

// Exhaustive maximum-cardinality feasible subset; test oracle, <= 20 candidates.
LinkSet max_feasible_set_bruteforce(std::span<const Link> candidates,
                                    std::span<const Point> positions,
                                    const InterferenceModel& model);

struct TwoHopParams {
    double sender_density = 0.2;  // theta in (0, 0.5)
    PhysicalParams phys;
    uint32_t relay_queue_cap = 1;  // phase-1 admission cap per (relay, flow)
};

struct TwoHopSelection {
    std::vector<Link> proposed;  // floor(theta*n) sender -> nearest-receiver pairs
    std::vector<Link> retained;  // subset with SINR >= beta under all proposed txs
};

// Sender set and SINR retention for one slot of the two-hop mobile scheme.
// Packet movement is decided afterwards by routing::two_hop_policy.
TwoHopSelection two_hop_select(std::span<const Point> positions, uint32_t n_ordinary,
                               const TwoHopParams& params, uint64_t seed, uint64_t slot);

}  // namespace capnet
