#include <cmath>
#include <deque>
#include <set>

#include <doctest.h>

#include "capnet/cellgrid.hpp"
#include "capnet/errors.hpp"
#include "capnet/rng.hpp"
#include "capnet/routing.hpp"

using namespace capnet;

namespace {

Deployment fixed_deployment(std::vector<Point> pts, double area = 1.0) {
    Deployment dep;
    dep.area_side = area;
    for (size_t i = 0; i < pts.size(); ++i)
        dep.nodes.push_back({NodeId(i), pts[i], NodeKind::Ordinary});
    return dep;
}

}  // namespace

TEST_CASE("build_cells bins nodes by floor division") {
    Deployment dep = fixed_deployment({{0.26, 0.74}, {0.01, 0.01}});
    CellGraph g = build_cells(dep, 0.25);
    CHECK(g.cell_count() == 16);
    CHECK(g.cell_of({0.26, 0.74}) == g.index(1, 2));
    CHECK(g.occupancy[g.index(1, 2)].size() == 1);
    CHECK(g.occupancy[g.index(0, 0)].size() == 1);
}

TEST_CASE("multicast-density cells are essentially never empty") {
    // cell side sqrt(5 ln n / n): expected occupancy 5 ln n
    const uint32_t n = 4000;
    Deployment dep = place_uniform(n, 1.0, 61);
    double side = std::sqrt(5.0 * std::log(double(n)) / double(n));
    CellGraph g = build_cells(dep, side);
    uint32_t nonempty = 0;
    for (CellIndex c = 0; c < g.cell_count(); ++c) nonempty += !g.empty_cell(c);
    CHECK(double(nonempty) / g.cell_count() >= 0.99);
}

TEST_CASE("crossed_cells walks the segment 4-connected") {
    Deployment dep = fixed_deployment({{0, 0}});
    CellGraph g = build_cells(dep, 0.2);
    auto cells = crossed_cells(g, {0.1, 0.1}, {0.9, 0.1});
    CHECK(cells.size() == 5);
    for (size_t i = 1; i < cells.size(); ++i) {
        int di = std::abs(int(g.col(cells[i])) - int(g.col(cells[i - 1])));
        int dj = std::abs(int(g.row(cells[i])) - int(g.row(cells[i - 1])));
        CHECK(di + dj == 1);  // strictly 4-connected
    }
    // diagonal segment stays 4-connected through corner crossings
    auto diag = crossed_cells(g, {0.05, 0.05}, {0.95, 0.95});
    for (size_t i = 1; i < diag.size(); ++i) {
        int di = std::abs(int(g.col(diag[i])) - int(g.col(diag[i - 1])));
        int dj = std::abs(int(g.row(diag[i])) - int(g.row(diag[i - 1])));
        CHECK(di + dj == 1);
    }
}

TEST_CASE("straight_line_route basics") {
    // nodes placed so each crossed cell of the test segment is occupied
    Deployment dep = fixed_deployment({{0.1, 0.1},   // source, cell (0,0)
                                       {0.3, 0.1},   // relay cell (1,0)
                                       {0.5, 0.1},   // relay cell (2,0)
                                       {0.7, 0.1},   // relay cell (3,0)
                                       {0.9, 0.1},   // destination cell (4,0)
                                       {0.11, 0.1}});
    CellGraph g = build_cells(dep, 0.2);
    auto pos = dep.positions();

    SUBCASE("same cell is a single hop") {
        Flow f{0, 0, {5}, FlowKind::Unicast};
        Route r = straight_line_route(f, g, pos);
        CHECK(r.hops.size() == 1);
        CHECK(r.hops[0].tx == 0);
        CHECK(r.hops[0].rx == 5);
    }

    SUBCASE("five crossed cells give four hops with lowest-id relays") {
        Flow f{0, 0, {4}, FlowKind::Unicast};
        Route r = straight_line_route(f, g, pos);
        CHECK(r.hops.size() == 4);
        CHECK(r.hops.front().tx == 0);
        CHECK(r.hops.back().rx == 4);
        auto cells = crossed_cells(g, pos[0], pos[4]);
        CHECK(r.hops.size() <= cells.size());  // one relay per crossed cell
    }

    SUBCASE("an empty crossed cell raises a routing hole unless detouring") {
        // straight path (0,0)..(4,0) holed at (2,0); 4-connected detour rides
        // the row above via (1,1),(2,1),(3,1)
        Deployment holed = fixed_deployment({{0.1, 0.1}, {0.9, 0.1}, {0.3, 0.1}, {0.7, 0.1},
                                             {0.3, 0.3}, {0.5, 0.3}, {0.7, 0.3}});
        CellGraph hg = build_cells(holed, 0.2);
        hg.eight_adjacent = false;
        auto hpos = holed.positions();
        Flow f{0, 0, {1}, FlowKind::Unicast};
        CHECK_THROWS_AS(straight_line_route(f, hg, hpos, false), RoutingHoleError);
        Route r = straight_line_route(f, hg, hpos, true);
        CHECK(r.hops.front().tx == 0);
        CHECK(r.hops.back().rx == 1);
        CHECK(r.hops.size() >= 5);  // detour is longer than the straight walk
    }
}

TEST_CASE("grid_route is the L-shaped lattice walk") {
    // 5x5 lattice on the unit square
    std::vector<Point> pts;
    for (uint32_t j = 0; j < 5; ++j)
        for (uint32_t i = 0; i < 5; ++i) pts.push_back({(i + 0.5) / 5, (j + 0.5) / 5});
    Deployment dep = fixed_deployment(pts);

    SUBCASE("same-row endpoints take the horizontal leg only") {
        Flow f{0, 0, {3}, FlowKind::Unicast};  // (0,0) -> (3,0)
        Route r = grid_route(f, dep, 0.21);
        CHECK(r.hops.size() == 3);
    }

    SUBCASE("manhattan hop count") {
        Flow f{0, 0, {23}, FlowKind::Unicast};  // (0,0) -> (3,4)
        Route r = grid_route(f, dep, 0.21);
        CHECK(r.hops.size() == 7);
    }

    SUBCASE("mean hops over random pairs matches the lattice moment") {
        // oracle: E|di| for uniform lattice indices = (m^2 - 1)/(3m) per axis,
        // conditioned on the endpoints being distinct
        const uint32_t m = 5;
        // distinct-node conditioning: P(same node) = 1/m^2 over the m^2 nodes
        double expected =
            2.0 * (double(m) * m - 1.0) / (3.0 * m) / (1.0 - 1.0 / (double(m) * m));
        Rng rng(8);
        double total = 0;
        const int reps = 4000;
        for (int rep = 0; rep < reps; ++rep) {
            NodeId a = NodeId(rng.below(25)), b = NodeId(rng.below(25));
            while (b == a) b = NodeId(rng.below(25));
            Flow f{0, a, {b}, FlowKind::Unicast};
            total += double(grid_route(f, dep, 0.21).hops.size());
        }
        CHECK(total / reps == doctest::Approx(expected).epsilon(0.08));
    }

    SUBCASE("spacing beyond range is rejected") {
        Flow f{0, 0, {3}, FlowKind::Unicast};
        CHECK_THROWS_AS(grid_route(f, dep, 0.15), InvalidScenarioError);
    }
}

TEST_CASE("find_highways on a fully occupied grid yields one crossing per row") {
    // 12x12 fully occupied: place one node per cell center
    std::vector<Point> pts;
    for (uint32_t j = 0; j < 12; ++j)
        for (uint32_t i = 0; i < 12; ++i) pts.push_back({i + 0.5, j + 0.5});
    Deployment dep = fixed_deployment(pts, 12.0);
    CellGraph g = build_cells(dep, 1.0);
    auto pos = dep.positions();
    HighwaySystem hw = find_highways(g, dep, pos, 1.0);
    // slab height = round(ln 144) = 5 rows -> 2 slabs of 6 rows, 6 crossings each
    REQUIRE(hw.h_crossings_per_slab.size() == hw.slab_count);
    uint32_t total = 0;
    for (uint32_t c : hw.h_crossings_per_slab) total += c;
    CHECK(total == 12);  // every row crosses

    // disjointness: no cell appears on two horizontal paths
    std::set<CellIndex> seen;
    for (const auto& p : hw.h_paths) {
        for (CellIndex c : p.cells) {
            CHECK(seen.count(c) == 0);
            seen.insert(c);
        }
        CHECK(g.col(p.cells.front()) == 0);
        CHECK(g.col(p.cells.back()) == g.nx - 1);
    }
}

TEST_CASE("find_highways single occupied row per slab yields one crossing") {
    std::vector<Point> pts;
    for (uint32_t i = 0; i < 12; ++i) pts.push_back({i + 0.5, 2.5});  // row 2 only
    for (uint32_t i = 0; i < 12; ++i) pts.push_back({i + 0.5, 8.5});  // row 8
    Deployment dep = fixed_deployment(pts, 12.0);
    CellGraph g = build_cells(dep, 1.0);
    auto pos = dep.positions();
    HighwaySystem hw = find_highways(g, dep, pos, 1.0);
    uint32_t total = 0;
    for (uint32_t c : hw.h_crossings_per_slab) total += c;
    CHECK(total == 2);
}

TEST_CASE("highway routes traverse access, highways and delivery") {
    const uint32_t n = 2500;
    Deployment dep = place_uniform(n, std::sqrt(double(n)), 71);
    CellGraph g = build_cells(dep, 1.5);
    g.eight_adjacent = false;
    auto pos = dep.positions();
    HighwaySystem hw = find_highways(g, dep, pos, 1.0);
    REQUIRE(!hw.h_paths.empty());
    REQUIRE(!hw.v_paths.empty());

    FlowSet fs = draw_unicast_flows(dep, 71);
    double highway_hops = 0;
    uint32_t flows = 0;
    for (const Flow& f : fs.flows) {
        Route r = highway_route(f, hw, g, pos);
        REQUIRE(!r.hops.empty());
        // consecutive hops chain tx -> rx
        for (size_t i = 1; i < r.hops.size(); ++i) CHECK(r.hops[i].tx == r.hops[i - 1].rx);
        uint32_t h2 = 0;
        for (const PathHop& h : r.hops) {
            h2 += h.phase == kPhaseHorizontal || h.phase == kPhaseVertical;
            if (h.phase == kPhaseHorizontal || h.phase == kPhaseVertical)
                CHECK(dist(pos[h.tx], pos[h.rx]) <= std::sqrt(8.0) * g.cell_side + 1e-9);
        }
        highway_hops += h2;
        ++flows;
    }
    // Theta(sqrt n) highway hops: mean within [0.5, 4] * sqrt(n)/1.5
    double mean = highway_hops / flows;
    CHECK(mean >= 0.5 * std::sqrt(double(n)) / 1.5);
    CHECK(mean <= 4.0 * std::sqrt(double(n)) / 1.5);
}

TEST_CASE("build_cds designates one connected relay per cell") {
    std::vector<Point> pts;
    for (uint32_t j = 0; j < 4; ++j)
        for (uint32_t i = 0; i < 4; ++i) {
            pts.push_back({(i + 0.3) / 4, (j + 0.3) / 4});
            pts.push_back({(i + 0.7) / 4, (j + 0.7) / 4});
        }
    Deployment dep = fixed_deployment(pts);
    CellGraph g = build_cells(dep, 0.25);
    Cds cds = build_cds(g);
    CHECK(cds.node_by_cell.size() == 16);

    // designated node is the lowest id in its cell
    for (CellIndex c = 0; c < g.cell_count(); ++c)
        CHECK(cds.node_by_cell[c] == g.occupancy[c].front());

    // grid BFS over cells reaches everything (connectivity of the CDS)
    std::vector<bool> vis(g.cell_count(), false);
    std::deque<CellIndex> q{0};
    vis[0] = true;
    uint32_t reached = 1;
    while (!q.empty()) {
        CellIndex c = q.front();
        q.pop_front();
        int32_t ci = g.col(c), cj = g.row(c);
        for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            int32_t ni = ci + di, nj = cj + dj;
            if (ni < 0 || nj < 0 || ni >= int32_t(g.nx) || nj >= int32_t(g.ny)) continue;
            CellIndex nc = g.index(ni, nj);
            if (!vis[nc]) {
                vis[nc] = true;
                ++reached;
                q.push_back(nc);
            }
        }
    }
    CHECK(reached == g.cell_count());

    // domination: every node within one hop of its cell's CDS node when
    // r >= sqrt(5) * cell_side (same-cell distance <= sqrt(2) * cell_side)
    auto pos = dep.positions();
    double r = std::sqrt(5.0) * g.cell_side;
    for (const auto& node : dep.nodes) {
        NodeId relay = cds.node_by_cell[g.cell_of(node.pos)];
        CHECK(dist(pos[node.id], pos[relay]) <= r);
    }

    Deployment sparse = fixed_deployment({{0.1, 0.1}, {0.9, 0.9}});
    CellGraph sg = build_cells(sparse, 0.25);
    CHECK_THROWS_AS(build_cds(sg), RoutingHoleError);
}

TEST_CASE("multicast_tree structure") {
    Deployment dep = place_uniform(1000, 1.0, 91);
    double side = std::sqrt(3.2 * std::log(1000.0) / 1000.0);
    CellGraph g = build_cells(dep, side);
    auto pos = dep.positions();
    Cds cds = build_cds(g);

    SUBCASE("l=2 tree follows the straight-line cells") {
        Flow f{0, 3, {700}, FlowKind::Multicast};
        Route tree = multicast_tree(f, cds, g, pos);
        auto cells = crossed_cells(g, pos[3], pos[700]);
        CHECK(tree.tree_cells.size() == cells.size());
    }

    SUBCASE("duplicate destination cells collapse") {
        // two destinations in the same cell: find a cell with >= 2 nodes
        CellIndex target = 0;
        for (CellIndex c = 0; c < g.cell_count(); ++c)
            if (g.occupancy[c].size() >= 2 && g.cell_of(pos[3]) != c) target = c;
        NodeId d1 = g.occupancy[target][0], d2 = g.occupancy[target][1];
        Flow one{0, 3, {d1}, FlowKind::Multicast};
        Flow two{0, 3, {d1, d2}, FlowKind::Multicast};
        CHECK(multicast_tree(one, cds, g, pos).tree_cells.size() ==
              multicast_tree(two, cds, g, pos).tree_cells.size());
    }

    SUBCASE("tree spans source and destination cells, parents precede children") {
        Flow f{0, 3, {700, 800, 900}, FlowKind::Multicast};
        Route tree = multicast_tree(f, cds, g, pos);
        CHECK(tree.tree_parent[0] == -1);
        for (size_t i = 1; i < tree.tree_cells.size(); ++i) {
            CHECK(tree.tree_parent[i] >= 0);
            CHECK(uint32_t(tree.tree_parent[i]) < i);
            CHECK(g.adjacent(tree.tree_cells[i], tree.tree_cells[tree.tree_parent[i]]));
        }
        std::set<CellIndex> cells(tree.tree_cells.begin(), tree.tree_cells.end());
        CHECK(cells.count(g.cell_of(pos[3])) == 1);
        for (NodeId d : f.destinations) CHECK(cells.count(g.cell_of(pos[d])) == 1);
        CHECK(cells.size() == tree.tree_cells.size());  // transmitted once each
    }
}

TEST_CASE("multicast tree size grows like sqrt(l)") {
    const uint32_t n = 4000;
    Deployment dep = place_uniform(n, 1.0, 101);
    double side = std::sqrt(3.2 * std::log(double(n)) / double(n));
    CellGraph g = build_cells(dep, side);
    auto pos = dep.positions();
    Cds cds = build_cds(g);

    std::vector<double> ls, sizes;
    for (uint32_t l : {4u, 8u, 16u, 32u, 64u}) {
        FlowSet fs = draw_multicast_flows(dep, 60, l, 500 + l);
        double mean = 0;
        for (const Flow& f : fs.flows)
            mean += double(multicast_tree(f, cds, g, pos).tree_cells.size());
        ls.push_back(std::log(double(l)));
        sizes.push_back(std::log(mean / fs.flows.size()));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t m = ls.size();
    for (size_t i = 0; i < m; ++i) {
        sx += ls[i];
        sy += sizes[i];
        sxx += ls[i] * ls[i];
        sxy += ls[i] * sizes[i];
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope >= 0.35);
    CHECK(slope <= 0.65);
}

TEST_CASE("hybrid_route prefers the shorter option and skips the backbone cost") {
    // ordinary nodes spanning a connected 4-adjacent cell corridor, one
    // infrastructure node at the center
    Deployment dep = fixed_deployment({{0.05, 0.05}, {0.08, 0.05}, {0.95, 0.95}, {0.3, 0.05},
                                       {0.55, 0.05}, {0.75, 0.25}, {0.75, 0.55}, {0.9, 0.75},
                                       {0.8, 0.05}});
    place_infrastructure(dep, 1, InfraMode::Grid, 1);
    NodeId infra = 9;
    CellGraph g = build_cells(dep, 0.25);
    g.eight_adjacent = false;
    auto pos = dep.positions();

    SUBCASE("destination closer than infrastructure keeps the ad-hoc route") {
        Flow f{0, 0, {1}, FlowKind::Unicast};
        Route r = hybrid_route(f, dep, g, pos, 0.3, true);
        CHECK(r.hops.size() == 1);
        CHECK(r.hops[0].rx == 1);
    }

    SUBCASE("far destination rides the backbone with two radio hops when in reach") {
        Flow f{0, 0, {2}, FlowKind::Unicast};
        Route r = hybrid_route(f, dep, g, pos, 0.7, true);
        REQUIRE(r.hops.size() == 2);
        CHECK(r.hops[0].tx == 0);
        CHECK(r.hops[0].rx == infra);
        CHECK(r.hops[1].tx == infra);  // backbone jump is free, same node here
        CHECK(r.hops[1].rx == 2);
    }

    SUBCASE("hybrid radio hops never exceed ad-hoc hops plus two") {
        for (NodeId d : {2u, 5u, 6u, 7u}) {
            Flow f{0, 0, {d}, FlowKind::Unicast};
            Route hyb = hybrid_route(f, dep, g, pos, 0.3, true);
            Route adhoc = straight_line_route(f, g, pos, true);
            CHECK(hyb.hops.size() <= adhoc.hops.size() + 2);
        }
    }
}

namespace {

struct MockCtx final : TwoHopContext {
    std::optional<uint32_t> own_flow;
    NodeId own_dest = 0;
    std::optional<uint32_t> relay_flow;  // packet held for the receiver
    bool accept = true;

    std::optional<uint32_t> flow_sourced_by(NodeId) const override { return own_flow; }
    NodeId flow_destination(uint32_t) const override { return own_dest; }
    std::optional<uint32_t> relay_packet_for(NodeId, NodeId) const override {
        return relay_flow;
    }
    bool relay_can_accept(NodeId, uint32_t) const override { return accept; }
};

}  // namespace

TEST_CASE("two_hop_policy decision table") {
    MockCtx ctx;
    ctx.own_flow = 7;
    ctx.own_dest = 42;

    SUBCASE("source paired with its own destination delivers directly") {
        ctx.relay_flow = std::nullopt;
        TwoHopAction a = two_hop_policy(1, 42, ctx);
        CHECK(a.kind == TwoHopActionKind::DeliverOwn);
        CHECK(a.flow_id == 7);
    }

    SUBCASE("held relay packet for the receiver is delivered first") {
        ctx.relay_flow = 3;
        TwoHopAction a = two_hop_policy(1, 42, ctx);
        CHECK(a.kind == TwoHopActionKind::DeliverRelay);
        CHECK(a.flow_id == 3);
    }

    SUBCASE("otherwise the source hands off a fresh packet") {
        ctx.relay_flow = std::nullopt;
        TwoHopAction a = two_hop_policy(1, 9, ctx);
        CHECK(a.kind == TwoHopActionKind::Handoff);
        CHECK(a.flow_id == 7);
    }

    SUBCASE("a full relay idles the pair; relays never forward to relays") {
        ctx.relay_flow = std::nullopt;
        ctx.accept = false;
        CHECK(two_hop_policy(1, 9, ctx).kind == TwoHopActionKind::Idle);
        ctx.own_flow = std::nullopt;  // pure relay with nothing for receiver
        CHECK(two_hop_policy(1, 9, ctx).kind == TwoHopActionKind::Idle);
    }
}

TEST_CASE("isolated cell fraction at density one") {
    // Monte Carlo oracle: 0.3537 +- 0.001 (the paper's independence form
    // c^2 e^{-c^2} e^{-pi c1^2} = 0.30230 under-counts the cell overlap)
    const double a = 400.0;
    const uint32_t n = uint32_t(a * a);
    Deployment dep = place_uniform(n, a, 777);
    CellGraph g = build_cells(dep, 1.0);
    auto pos = dep.positions();
    double frac = isolated_cell_fraction(g, pos, 0.25);
    CHECK(frac == doctest::Approx(0.3537).epsilon(0.03));
    double formula = 1.0 * std::exp(-1.0) * std::exp(-M_PI * 0.25 * 0.25);
    CHECK(formula == doctest::Approx(0.30230).epsilon(1e-4));
}
