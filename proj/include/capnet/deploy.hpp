#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capnet/geometry.hpp"

namespace capnet {

enum class NodeKind : uint8_t { Ordinary, Infrastructure };

struct Node {
    NodeId id;
    Point pos;
    NodeKind kind;
};

// Node placement on [0, area_side]^2. Ids are contiguous from 0; ordinary
// nodes always precede infrastructure nodes.
struct Deployment {
    double area_side = 1.0;
    std::vector<Node> nodes;
    uint64_t rng_seed = 0;

    size_t size() const { return nodes.size(); }
    size_t ordinary_count() const;
    const Point& pos(NodeId id) const { return nodes[id].pos; }
    std::vector<Point> positions() const;
};

enum class MobilityKind : uint8_t { Static, IidReshuffle };

struct MobilityModel {
    MobilityKind kind = MobilityKind::Static;
};

enum class FlowKind : uint8_t { Unicast, Multicast };

struct Flow {
    uint32_t flow_id;
    NodeId source;
    std::vector<NodeId> destinations;  // exactly 1 for unicast
    FlowKind kind;
};

struct FlowSet {
    std::vector<Flow> flows;
};

Deployment place_uniform(uint32_t n, double area_side, uint64_t seed);

enum class InfraMode : uint8_t { Grid, Uniform };

// Appends m infrastructure nodes to dep. Grid mode: centers of a ceil(sqrt(m))
// square lattice, first m cells in row-major order (x fastest).
void place_infrastructure(Deployment& dep, uint32_t m, InfraMode mode, uint64_t seed);

FlowSet draw_unicast_flows(const Deployment& dep, uint64_t seed);

// n_s sources without replacement; each flow's destinations are the ordinary
// nodes nearest to l-1 uniform points, deduplicated, source excluded.
FlowSet draw_multicast_flows(const Deployment& dep, uint32_t n_s, uint32_t l, uint64_t seed);

// Static: returns dep unchanged. IidReshuffle: fresh uniform positions for
// ordinary nodes (infrastructure pinned), derived from (seed, slot_index).
Deployment step_mobility(const Deployment& dep, const MobilityModel& model, uint64_t seed,
                         uint64_t slot_index);

// In-place variant used by the engine's slot loop.
void step_mobility_inplace(std::vector<Point>& positions, const Deployment& dep,
                           const MobilityModel& model, uint64_t seed, uint64_t slot_index);

// r(n) = sqrt((ln n + margin) / (pi n)); the a.a.s. connectivity threshold.
double critical_range(uint32_t n, double margin);

std::string deployment_to_csv(const Deployment& dep);

}  // namespace capnet
