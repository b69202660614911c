#include "capnet/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "capnet/errors.hpp"
#include "capnet/rng.hpp"

namespace capnet {

namespace {

constexpr double kSqrt5 = 2.2360679774997896;

uint64_t retry_seed(uint64_t seed, uint32_t attempt) {
    return attempt == 0 ? seed : mix_seed(seed, 0xdead0000ULL + attempt);
}

}  // namespace

Scenario make_cell_tdma_scenario(uint32_t n, uint64_t seed, const CellTdmaOptions& opt) {
    if (n < 8) throw InvalidScenarioError("make_cell_tdma_scenario: need n >= 8");
    const double cell_target = std::sqrt(opt.kappa_cell * std::log(double(n)) / double(n));
    const uint32_t d = min_reuse_parameter(cell_target, kSqrt5 * cell_target, opt.guard, false);
    const uint32_t l = 2 * (d + 1);

    for (uint32_t attempt = 0;; ++attempt) {
        if (attempt >= opt.max_retries)
            throw RoutingHoleError("make_cell_tdma_scenario: no hole-free deployment found");
        uint64_t s = retry_seed(seed, attempt);
        Scenario sc;
        sc.scheduler = SchedulerId::CellTdmaStraightline;
        sc.deployment = place_uniform(n, 1.0, s);
        sc.flows = draw_unicast_flows(sc.deployment, s);
        sc.cells = build_cells(sc.deployment, cell_target);
        sc.cells.eight_adjacent = false;
        if (sc.cells.nx < l) {
            // small n: enlarge cells to fit one reuse block
            sc.cells = build_cells(sc.deployment, 1.0 / l);
            sc.cells.eight_adjacent = false;
        }
        const double c = sc.cells.cell_side;
        sc.tdma = build_cell_tdma(1.0, c, d);
        ProtocolParams p;
        p.range = kSqrt5 * c;
        p.guard = opt.guard;
        sc.interference = p;
        sc.injection.window = opt.window;
        sc.deployment_retries = attempt;
        sc.connectivity_range = critical_range(n, std::log(std::log(double(n))));
        sc.derived_seeds = {{"deployment", s}};

        auto positions = sc.deployment.positions();
        bool ok = true;
        sc.routes.reserve(sc.flows.flows.size());
        for (const Flow& f : sc.flows.flows) {
            try {
                sc.routes.push_back(straight_line_route(f, sc.cells, positions, true));
            } catch (const RoutingHoleError&) {
                ok = false;  // occupied cells disconnected; resample
                break;
            }
        }
        if (ok) return sc;
    }
}

namespace {

// Lattice-ring lower bound on the SINR a TDMA phase guarantees: signal at the
// maximum hop length against interferers packed on every same-phase cell.
double tdma_sinr_bound(double cell, uint32_t l, double max_hop, const HighwayOptions& opt,
                       double extent) {
    double signal = opt.power * attenuation(max_hop, opt.alpha, opt.absorption);
    double interference = 0.0;
    uint32_t rings = std::max<uint32_t>(2, static_cast<uint32_t>(extent / (l * cell)) + 2);
    for (uint32_t k = 1; k <= rings; ++k) {
        double gap = (double(k) * l - 1.0) * cell - max_hop;
        if (gap < 0.1 * cell) gap = 0.1 * cell;
        interference += 8.0 * k * opt.power * attenuation(gap, opt.alpha, opt.absorption);
    }
    return signal / (opt.noise + interference);
}

}  // namespace

Scenario make_highway_scenario(uint32_t n, uint64_t seed, const HighwayOptions& opt) {
    if (n < 64) throw InvalidScenarioError("make_highway_scenario: need n >= 64");
    const double a = std::sqrt(double(n));  // density-1 square

    for (uint32_t attempt = 0;; ++attempt) {
        if (attempt >= opt.max_retries)
            throw RoutingHoleError("make_highway_scenario: no usable highway system found");
        uint64_t s = retry_seed(seed, attempt);
        Scenario sc;
        sc.scheduler = SchedulerId::Highway4Phase;
        sc.deployment = place_uniform(n, a, s);
        sc.flows = draw_unicast_flows(sc.deployment, s);
        sc.cells = build_cells(sc.deployment, opt.cell_side);
        sc.cells.eight_adjacent = false;
        auto positions = sc.deployment.positions();

        HighwaySystem hw = find_highways(sc.cells, sc.deployment, positions, opt.kappa);
        if (hw.h_paths.empty() || hw.v_paths.empty()) continue;

        bool ok = true;
        sc.routes.reserve(sc.flows.flows.size());
        for (const Flow& f : sc.flows.flows) {
            try {
                sc.routes.push_back(highway_route(f, hw, sc.cells, positions));
            } catch (const RoutingHoleError&) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        // measured max hop length per phase fixes each phase's reuse
        std::array<double, 4> max_hop{0.0, 0.0, 0.0, 0.0};
        for (const Route& r : sc.routes) {
            for (const PathHop& h : r.hops) {
                uint32_t p = h.phase == kPhaseAccess       ? 0u
                             : h.phase == kPhaseHorizontal ? 1u
                             : h.phase == kPhaseVertical   ? 2u
                                                           : 3u;
                max_hop[p] = std::max(max_hop[p], dist(positions[h.tx], positions[h.rx]));
            }
        }
        const double c = sc.cells.cell_side;
        PhysicalParams phys;
        phys.power = opt.power;
        phys.noise = opt.noise;
        phys.path_loss_exponent = opt.alpha;
        phys.absorption = opt.absorption;
        phys.gain = GainModel::Attenuation;
        bool fits = true;
        for (uint32_t p = 0; p < 4; ++p) {
            double hop = std::max(max_hop[p], kSqrt5 * c);
            uint32_t d = 0;
            double bound = 0.0;
            for (uint32_t cand = 1; cand < 64; ++cand) {
                uint32_t l = 2 * (cand + 1);
                if (l > sc.cells.nx) break;
                bound = tdma_sinr_bound(c, l, hop, opt, a);
                if (bound >= opt.beta_floor) {
                    d = cand;
                    break;
                }
            }
            if (d == 0) {
                fits = false;
                break;
            }
            sc.phase_tdma[p] = build_cell_tdma(a, c, d);
            sc.phase_beta[p] = 0.999 * bound;
        }
        if (!fits) continue;

        phys.sinr_threshold = *std::min_element(sc.phase_beta.begin(), sc.phase_beta.end());
        sc.interference = phys;
        sc.injection.window = opt.window;
        sc.deployment_retries = attempt;
        sc.connectivity_range = critical_range(n, std::log(std::log(double(n))));
        sc.derived_seeds = {{"deployment", s}};
        sc.highways = std::move(hw);
        return sc;
    }
}

Scenario make_mobile_scenario(uint32_t n, uint64_t seed, const MobileOptions& opt) {
    if (n < 4) throw InvalidScenarioError("make_mobile_scenario: need n >= 4");
    Scenario sc;
    sc.scheduler = SchedulerId::TwoHopMobile;
    sc.deployment = place_uniform(n, 1.0, seed);
    sc.mobility.kind = MobilityKind::IidReshuffle;
    sc.flows = draw_unicast_flows(sc.deployment, seed);
    sc.two_hop.sender_density = opt.theta;
    sc.two_hop.relay_queue_cap = opt.relay_queue_cap;
    sc.two_hop.phys.power = opt.power;
    sc.two_hop.phys.noise = opt.noise;
    sc.two_hop.phys.processing_gain = opt.processing_gain;
    sc.two_hop.phys.sinr_threshold = opt.beta;
    sc.two_hop.phys.path_loss_exponent = opt.alpha;
    sc.two_hop.phys.gain = GainModel::PowerLaw;
    sc.interference = sc.two_hop.phys;
    sc.verify_every_slot = n <= opt.verify_limit;
    sc.connectivity_range = critical_range(n, std::log(std::log(double(n))));
    sc.derived_seeds = {{"deployment", seed}};
    return sc;
}

Scenario make_multicast_scenario(uint32_t n, uint32_t l, uint64_t seed,
                                 const MulticastOptions& opt) {
    if (n < 16) throw InvalidScenarioError("make_multicast_scenario: need n >= 16");
    const double cell_target = std::sqrt(opt.kappa_cell * std::log(double(n)) / double(n));
    const uint32_t d = min_reuse_parameter(cell_target, kSqrt5 * cell_target, opt.guard, true);
    const uint32_t reuse_l = 2 * (d + 1);

    for (uint32_t attempt = 0;; ++attempt) {
        if (attempt >= opt.max_retries)
            throw RoutingHoleError("make_multicast_scenario: empty CDS cell persisted");
        uint64_t s = retry_seed(seed, attempt);
        Scenario sc;
        sc.scheduler = SchedulerId::MulticastCds;
        sc.deployment = place_uniform(n, 1.0, s);
        sc.cells = build_cells(sc.deployment, cell_target);
        sc.cells.eight_adjacent = false;
        if (sc.cells.nx < reuse_l) {
            sc.cells = build_cells(sc.deployment, 1.0 / reuse_l);
            sc.cells.eight_adjacent = false;
        }
        Cds cds;
        try {
            cds = build_cds(sc.cells);
        } catch (const RoutingHoleError&) {
            continue;  // an empty cell; resample
        }
        uint32_t n_s = std::min(opt.n_s, n);
        sc.flows = draw_multicast_flows(sc.deployment, n_s, l, s);
        auto positions = sc.deployment.positions();
        sc.routes.reserve(sc.flows.flows.size());
        for (const Flow& f : sc.flows.flows)
            sc.routes.push_back(multicast_tree(f, cds, sc.cells, positions));

        const double c = sc.cells.cell_side;
        sc.tdma = build_cell_tdma(1.0, c, d);
        ProtocolParams p;
        p.range = kSqrt5 * c;
        p.guard = opt.guard;
        sc.interference = p;
        sc.injection.window = opt.window;
        sc.deployment_retries = attempt;
        sc.connectivity_range = critical_range(n, std::log(std::log(double(n))));
        sc.derived_seeds = {{"deployment", s}};
        return sc;
    }
}

Scenario make_hybrid_scenario(uint32_t n, uint32_t m, uint64_t seed, const HybridOptions& opt) {
    if (n < 16) throw InvalidScenarioError("make_hybrid_scenario: need n >= 16");
    if (m < 1) throw InvalidScenarioError("make_hybrid_scenario: need m >= 1");
    double range;
    if (opt.regime == HybridRegime::ShrunkRange) {
        range = opt.range_coeff / std::sqrt(double(m));
    } else {
        range = kSqrt5 * std::sqrt(opt.kappa_cell * std::log(double(n)) / double(n));
    }
    const double cell_target = range / kSqrt5;
    // single long hops may land anywhere within the range ball
    const uint32_t d = min_reuse_parameter(cell_target, range, opt.guard, true);
    const uint32_t reuse_l = 2 * (d + 1);

    for (uint32_t attempt = 0;; ++attempt) {
        if (attempt >= opt.max_retries)
            throw RoutingHoleError("make_hybrid_scenario: no routable deployment found");
        uint64_t s = retry_seed(seed, attempt);
        Scenario sc;
        sc.scheduler = SchedulerId::Hybrid;
        sc.deployment = place_uniform(n, 1.0, s);
        place_infrastructure(sc.deployment, m, opt.infra_mode, s);
        sc.flows = draw_unicast_flows(sc.deployment, s);
        sc.cells = build_cells(sc.deployment, cell_target);
        sc.cells.eight_adjacent = false;
        if (sc.cells.nx < reuse_l) {
            sc.cells = build_cells(sc.deployment, 1.0 / reuse_l);
            sc.cells.eight_adjacent = false;
        }
        const double c = sc.cells.cell_side;
        sc.tdma = build_cell_tdma(1.0, c, d);
        ProtocolParams p;
        p.range = std::max(range, kSqrt5 * c);
        p.guard = opt.guard;
        sc.interference = p;
        sc.injection.window = opt.window;
        if (opt.fair_rate_headroom > 0.0) {
            double cycle = double(sc.tdma.cycle_length);
            sc.injection.rate_cap = opt.fair_rate_headroom * double(m) / (cycle * double(n));
        }
        sc.deployment_retries = attempt;
        sc.connectivity_range = critical_range(n, std::log(std::log(double(n))));
        sc.derived_seeds = {{"deployment", s}};

        auto positions = sc.deployment.positions();
        // balance backbone load: each flow's downlink infra is the least
        // loaded among the few nearest the destination
        std::vector<NodeId> infra_ids;
        for (const auto& node : sc.deployment.nodes)
            if (node.kind == NodeKind::Infrastructure) infra_ids.push_back(node.id);
        std::vector<uint32_t> load(sc.deployment.size(), 0);
        auto balanced_downlink = [&](NodeId dst) {
            std::vector<std::pair<double, NodeId>> near;
            for (NodeId i : infra_ids) near.push_back({dist2(positions[i], positions[dst]), i});
            size_t k = std::min<size_t>(4, near.size());
            std::partial_sort(near.begin(), near.begin() + k, near.end());
            NodeId best = near[0].second;
            for (size_t j = 1; j < k; ++j)
                if (load[near[j].second] < load[best]) best = near[j].second;
            return best;
        };

        bool ok = true;
        sc.routes.reserve(sc.flows.flows.size());
        for (const Flow& f : sc.flows.flows) {
            try {
                NodeId down = balanced_downlink(f.destinations[0]);
                Route r =
                    hybrid_route(f, sc.deployment, sc.cells, positions, p.range, true, down);
                bool uses_backbone = false;
                for (const PathHop& h : r.hops) uses_backbone |= (h.tx == down);
                if (uses_backbone) load[down]++;
                sc.routes.push_back(std::move(r));
            } catch (const RoutingHoleError&) {
                ok = false;
                break;
            }
        }
        if (ok) return sc;
    }
}

uint64_t default_horizon(SchedulerId family, uint32_t n) {
    const double base = 50.0 * std::sqrt(double(n) * std::log(double(n)));
    switch (family) {
        case SchedulerId::TwoHopMobile:
            // relay pool equilibrates over ~6.5 n slots
            return std::max<uint64_t>(40000, 80ull * n);
        case SchedulerId::Highway4Phase:
            // bottleneck highway-cell queues fill over ~1e5 slots at the
            // 4-phase reuse clock
            return std::max<uint64_t>(250000, static_cast<uint64_t>(base));
        case SchedulerId::MulticastCds:
            return std::max<uint64_t>(60000, static_cast<uint64_t>(base));
        case SchedulerId::Hybrid:
            // downlink queues at infrastructure cells fill over ~1e4 slots
            return std::max<uint64_t>(100000, static_cast<uint64_t>(base));
        default:
            return std::max<uint64_t>(20000, static_cast<uint64_t>(base));
    }
}

}  // namespace capnet
