#include "capnet/deploy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "capnet/errors.hpp"
#include "capnet/rng.hpp"

namespace capnet {

namespace {
// stream tags for derived seeds
constexpr uint64_t kStreamPlace = 0x01;
constexpr uint64_t kStreamInfra = 0x02;
constexpr uint64_t kStreamUnicast = 0x03;
constexpr uint64_t kStreamMulticast = 0x04;
constexpr uint64_t kStreamMobility = 0x05;
}  // namespace

size_t Deployment::ordinary_count() const {
    size_t c = 0;
    for (const auto& n : nodes)
        if (n.kind == NodeKind::Ordinary) ++c;
    return c;
}

std::vector<Point> Deployment::positions() const {
    std::vector<Point> p;
    p.reserve(nodes.size());
    for (const auto& n : nodes) p.push_back(n.pos);
    return p;
}

Deployment place_uniform(uint32_t n, double area_side, uint64_t seed) {
    if (n < 2) throw InvalidScenarioError("place_uniform: need n >= 2, got " + std::to_string(n));
    if (!(area_side > 0.0)) throw InvalidScenarioError("place_uniform: area_side must be > 0");
    Deployment dep;
    dep.area_side = area_side;
    dep.rng_seed = seed;
    dep.nodes.reserve(n);
    Rng rng = Rng::derived(seed, kStreamPlace);
    for (uint32_t i = 0; i < n; ++i) {
        dep.nodes.push_back(
            {i, {rng.uniform(0.0, area_side), rng.uniform(0.0, area_side)}, NodeKind::Ordinary});
    }
    return dep;
}

void place_infrastructure(Deployment& dep, uint32_t m, InfraMode mode, uint64_t seed) {
    if (m < 1) throw InvalidScenarioError("place_infrastructure: need m >= 1");
    const double a = dep.area_side;
    NodeId next = static_cast<NodeId>(dep.nodes.size());
    if (mode == InfraMode::Grid) {
        uint32_t g = static_cast<uint32_t>(std::ceil(std::sqrt(static_cast<double>(m))));
        double pitch = a / g;
        for (uint32_t k = 0; k < m; ++k) {
            uint32_t i = k % g, j = k / g;  // x fastest
            dep.nodes.push_back(
                {next++, {(i + 0.5) * pitch, (j + 0.5) * pitch}, NodeKind::Infrastructure});
        }
    } else {
        Rng rng = Rng::derived(seed, kStreamInfra);
        for (uint32_t k = 0; k < m; ++k) {
            dep.nodes.push_back(
                {next++, {rng.uniform(0.0, a), rng.uniform(0.0, a)}, NodeKind::Infrastructure});
        }
    }
}

namespace {
std::vector<NodeId> ordinary_ids(const Deployment& dep) {
    std::vector<NodeId> ids;
    for (const auto& n : dep.nodes)
        if (n.kind == NodeKind::Ordinary) ids.push_back(n.id);
    return ids;
}
}  // namespace

FlowSet draw_unicast_flows(const Deployment& dep, uint64_t seed) {
    auto ids = ordinary_ids(dep);
    if (ids.size() < 2)
        throw InvalidScenarioError("draw_unicast_flows: need >= 2 ordinary nodes");
    Rng rng = Rng::derived(seed, kStreamUnicast);
    FlowSet fs;
    fs.flows.reserve(ids.size());
    uint32_t fid = 0;
    for (size_t self = 0; self < ids.size(); ++self) {
        // destination uniform over the other ordinary nodes
        uint64_t pick = rng.below(ids.size() - 1);
        NodeId dst = ids[pick < self ? pick : pick + 1];
        fs.flows.push_back({fid++, ids[self], {dst}, FlowKind::Unicast});
    }
    return fs;
}

namespace {
// uniform-grid bucket index for repeated nearest-ordinary-node queries
struct NearestIndex {
    double cell = 1.0;
    uint32_t side = 1;
    std::vector<std::vector<NodeId>> buckets;
    const Deployment* dep = nullptr;

    NearestIndex(const Deployment& d, const std::vector<NodeId>& ids) : dep(&d) {
        side = std::max<uint32_t>(
            1, static_cast<uint32_t>(std::sqrt(static_cast<double>(ids.size()) / 2.0)));
        cell = d.area_side / side;
        buckets.assign(static_cast<size_t>(side) * side, {});
        for (NodeId id : ids) buckets[bucket_of(d.nodes[id].pos)].push_back(id);
    }

    size_t bucket_of(const Point& p) const {
        auto clampi = [&](int32_t v) {
            return std::min(std::max(v, 0), static_cast<int32_t>(side) - 1);
        };
        int32_t i = clampi(static_cast<int32_t>(p.x / cell));
        int32_t j = clampi(static_cast<int32_t>(p.y / cell));
        return static_cast<size_t>(j) * side + i;
    }

    NodeId nearest(const Point& p) const {
        int32_t i0 = static_cast<int32_t>(p.x / cell);
        int32_t j0 = static_cast<int32_t>(p.y / cell);
        double best = std::numeric_limits<double>::infinity();
        NodeId bid = 0;
        for (int32_t ring = 0; ring < static_cast<int32_t>(side) + 1; ++ring) {
            if (best <= (ring - 1) * cell * ((ring - 1) * cell) && ring > 1) break;
            for (int32_t j = j0 - ring; j <= j0 + ring; ++j) {
                if (j < 0 || j >= static_cast<int32_t>(side)) continue;
                for (int32_t i = i0 - ring; i <= i0 + ring; ++i) {
                    if (i < 0 || i >= static_cast<int32_t>(side)) continue;
                    if (std::max(std::abs(i - i0), std::abs(j - j0)) != ring) continue;
                    for (NodeId id : buckets[static_cast<size_t>(j) * side + i]) {
                        double d = dist2(dep->nodes[id].pos, p);
                        if (d < best) {
                            best = d;
                            bid = id;
                        }
                    }
                }
            }
        }
        return bid;
    }
};
}  // namespace

FlowSet draw_multicast_flows(const Deployment& dep, uint32_t n_s, uint32_t l, uint64_t seed) {
    auto ids = ordinary_ids(dep);
    const uint32_t n = static_cast<uint32_t>(ids.size());
    if (l < 2 || l > n)
        throw InvalidScenarioError("draw_multicast_flows: need 2 <= l <= n");
    if (n_s > n) throw InvalidScenarioError("draw_multicast_flows: n_s > ordinary node count");
    Rng rng = Rng::derived(seed, kStreamMulticast);
    auto src_idx = rng.sample_without_replacement(n, n_s);
    NearestIndex index(dep, ids);

    FlowSet fs;
    fs.flows.reserve(n_s);
    uint32_t fid = 0;
    for (uint32_t si : src_idx) {
        NodeId src = ids[si];
        std::vector<NodeId> dests;
        for (uint32_t j = 0; j + 1 < l; ++j) {
            Point p{rng.uniform(0.0, dep.area_side), rng.uniform(0.0, dep.area_side)};
            NodeId bid = index.nearest(p);
            if (bid != src) dests.push_back(bid);
        }
        std::sort(dests.begin(), dests.end());
        dests.erase(std::unique(dests.begin(), dests.end()), dests.end());
        if (dests.empty()) {
            // all l-1 points collapsed onto the source; redraw one destination
            uint64_t pick = rng.below(n - 1);
            size_t self = std::lower_bound(ids.begin(), ids.end(), src) - ids.begin();
            dests.push_back(ids[pick < self ? pick : pick + 1]);
        }
        fs.flows.push_back({fid++, src, std::move(dests), FlowKind::Multicast});
    }
    return fs;
}

void step_mobility_inplace(std::vector<Point>& positions, const Deployment& dep,
                           const MobilityModel& model, uint64_t seed, uint64_t slot_index) {
    if (model.kind == MobilityKind::Static) return;
    Rng rng = Rng::derived(mix_seed(seed, kStreamMobility), slot_index);
    for (const auto& n : dep.nodes) {
        if (n.kind != NodeKind::Ordinary) continue;
        positions[n.id] = {rng.uniform(0.0, dep.area_side), rng.uniform(0.0, dep.area_side)};
    }
}

Deployment step_mobility(const Deployment& dep, const MobilityModel& model, uint64_t seed,
                         uint64_t slot_index) {
    Deployment out = dep;
    if (model.kind == MobilityKind::Static) return out;
    std::vector<Point> pos = dep.positions();
    step_mobility_inplace(pos, dep, model, seed, slot_index);
    for (auto& n : out.nodes) n.pos = pos[n.id];
    return out;
}

double critical_range(uint32_t n, double margin) {
    if (n < 2) throw InvalidScenarioError("critical_range: need n >= 2");
    double arg = std::log(static_cast<double>(n)) + margin;
    if (!(arg > 0.0))
        throw InvalidScenarioError("critical_range: ln(n) + margin must be positive");
    return std::sqrt(arg / (M_PI * static_cast<double>(n)));
}

std::string deployment_to_csv(const Deployment& dep) {
    std::ostringstream os;
    os.precision(17);
    os << "node_id,x,y,kind\n";
    for (const auto& n : dep.nodes) {
        os << n.id << ',' << n.pos.x << ',' << n.pos.y << ','
           << (n.kind == NodeKind::Ordinary ? "ordinary" : "infrastructure") << '\n';
    }
    return os.str();
}

}  // namespace capnet
