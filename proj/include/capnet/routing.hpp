#pragma once

#include <optional>
#include <span>
#include <vector>

#include "capnet/cellgrid.hpp"
#include "capnet/deploy.hpp"

namespace capnet {

enum class RouteKind : uint8_t { Path, Tree };

// Phase tags used by the four-phase highway scheduler; 0 everywhere else.
enum HighwayPhase : uint8_t {
    kPhaseNone = 0,
    kPhaseAccess = 1,
    kPhaseHorizontal = 2,
    kPhaseVertical = 3,
    kPhaseDelivery = 4,
};

struct PathHop {
    NodeId tx;
    NodeId rx;
    CellIndex tx_cell = 0;  // cell whose service queue carries this hop
    uint8_t phase = kPhaseNone;
};

struct Route {
    uint32_t flow_id = 0;
    RouteKind kind = RouteKind::Path;

    // Path form
    std::vector<PathHop> hops;

    // Tree form: tree_cells[0] is the source cell; parents precede children.
    std::vector<CellIndex> tree_cells;
    std::vector<int32_t> tree_parent;  // index into tree_cells, -1 for the root
    std::vector<NodeId> tree_tx;       // transmitting node per tree cell

    size_t radio_hop_count() const {
        return kind == RouteKind::Path ? hops.size() : tree_cells.size();
    }
};

// One relay per crossed cell along the source-destination segment, lowest
// node id per cell. Throws RoutingHoleError on an empty crossed cell. With
// allow_detour the route falls back to a BFS path over occupied cells.
Route straight_line_route(const Flow& flow, const CellGraph& cells,
                          std::span<const Point> positions, bool allow_detour = false);

// L-shaped Manhattan route over lattice-placed ordinary nodes (horizontal leg
// first). The lattice pitch is inferred from the node count.
Route grid_route(const Flow& flow, const Deployment& dep, double range);

struct HighwayPath {
    std::vector<CellIndex> cells;  // ordered crossing, full width or height
};

struct HighwaySystem {
    uint32_t slab_count = 0;      // L, same for horizontal and vertical
    uint32_t rows_per_slab = 0;   // nominal (last slab may differ)
    std::vector<HighwayPath> h_paths;                  // left-right crossings
    std::vector<HighwayPath> v_paths;                  // top-bottom crossings
    std::vector<uint32_t> h_crossings_per_slab;
    std::vector<uint32_t> v_crossings_per_slab;
    // per ordinary node: nearest horizontal/vertical highway cell and path
    std::vector<CellIndex> entry_h_cell;
    std::vector<uint32_t> entry_h_path;
    std::vector<CellIndex> entry_v_cell;
    std::vector<uint32_t> entry_v_path;

    uint32_t zero_crossing_slabs() const {
        uint32_t z = 0;
        for (uint32_t c : h_crossings_per_slab) z += (c == 0);
        for (uint32_t c : v_crossings_per_slab) z += (c == 0);
        return z;
    }
};

// Maximum vertex-disjoint occupied-cell crossings per slab (unit-capacity
// max-flow, 4-adjacency). Slab height is kappa*ln(n) cell rows; slabs with
// zero crossings are reported in the result, not fatal.
HighwaySystem find_highways(const CellGraph& cells, const Deployment& dep,
                            std::span<const Point> positions, double kappa);

// Four-phase route: access hop to the nearest horizontal highway, transport
// along it, transfer to the destination's vertical highway, delivery hop.
Route highway_route(const Flow& flow, const HighwaySystem& highways, const CellGraph& cells,
                    std::span<const Point> positions);

// Connected dominating set: the designated (lowest-id) node per cell.
struct Cds {
    std::vector<NodeId> node_by_cell;  // indexed by CellIndex
};

Cds build_cds(const CellGraph& cells);

// Union of straight-line cell paths from the source cell to each destination
// cell (shared prefixes deduplicated); every tree cell broadcasts once.
Route multicast_tree(const Flow& flow, const Cds& cds, const CellGraph& cells,
                     std::span<const Point> positions);

// Ordinary -> nearest infrastructure (multi-hop cells), zero-cost backbone,
// infrastructure near the destination -> destination. Falls back to the pure
// ad-hoc route when that is shorter in radio hops. `downlink_infra` overrides
// the nearest-to-destination choice (the builder balances backbone load with
// it, per the optimized-routing assumption of the hybrid model).
Route hybrid_route(const Flow& flow, const Deployment& dep, const CellGraph& cells,
                   std::span<const Point> positions, double range, bool allow_detour = false,
                   std::optional<NodeId> downlink_infra = std::nullopt);

// --- two-hop relay policy (mobile) ---

enum class TwoHopActionKind : uint8_t { DeliverOwn, DeliverRelay, Handoff, Idle };

struct TwoHopAction {
    TwoHopActionKind kind = TwoHopActionKind::Idle;
    uint32_t flow_id = 0;
};

// Engine-side state the policy consults; keeps the policy itself pure.
class TwoHopContext {
   public:
    virtual ~TwoHopContext() = default;
    virtual std::optional<uint32_t> flow_sourced_by(NodeId node) const = 0;
    virtual NodeId flow_destination(uint32_t flow_id) const = 0;
    // a relay packet held by `holder` whose flow is destined to `dest`
    virtual std::optional<uint32_t> relay_packet_for(NodeId holder, NodeId dest) const = 0;
    virtual bool relay_can_accept(NodeId relay, uint32_t flow_id) const = 0;
};

// Relay-priority two-hop decision for one scheduled sender-receiver pair.
// Relays never forward to other relays; handoffs only move source packets.
TwoHopAction two_hop_policy(NodeId sender, NodeId receiver, const TwoHopContext& ctx);

// Diagnostic for the highway precondition: fraction of cells holding exactly
// one node with no other node within isolation_radius of it.
double isolated_cell_fraction(const CellGraph& cells, std::span<const Point> positions,
                              double isolation_radius);

}  // namespace capnet
