#include <cmath>

#include <doctest.h>

#include "capnet/engine.hpp"
#include "capnet/errors.hpp"
#include "capnet/scenario.hpp"

using namespace capnet;

namespace {

// Two nodes, one flow, direct link every slot.
Scenario two_node_scenario() {
    Scenario sc;
    sc.scheduler = SchedulerId::ManualGreedy;
    sc.deployment.area_side = 1.0;
    sc.deployment.nodes = {{0, {0.0, 0.0}, NodeKind::Ordinary},
                           {1, {0.05, 0.0}, NodeKind::Ordinary}};
    sc.flows.flows = {{0, 0, {1}, FlowKind::Unicast}};
    Route r;
    r.flow_id = 0;
    r.hops = {{0, 1, 0, kPhaseNone}};
    sc.routes = {r};
    ProtocolParams p{0.1, 1.0};
    sc.interference = p;
    return sc;
}

// A -> B -> C chain; B cannot transmit and receive in one slot and A's
// transmission towers over C's guard zone, so slots alternate.
Scenario chain_scenario(bool two_way = false) {
    Scenario sc;
    sc.scheduler = SchedulerId::ManualGreedy;
    sc.deployment.area_side = 1.0;
    sc.deployment.nodes = {{0, {0.0, 0.0}, NodeKind::Ordinary},
                           {1, {0.05, 0.0}, NodeKind::Ordinary},
                           {2, {0.10, 0.0}, NodeKind::Ordinary}};
    sc.flows.flows = {{0, 0, {2}, FlowKind::Unicast}};
    Route ac;
    ac.flow_id = 0;
    ac.hops = {{0, 1, 0, kPhaseNone}, {1, 2, 0, kPhaseNone}};
    sc.routes = {ac};
    if (two_way) {
        sc.flows.flows.push_back({1, 2, {0}, FlowKind::Unicast});
        Route ca;
        ca.flow_id = 1;
        ca.hops = {{2, 1, 0, kPhaseNone}, {1, 0, 0, kPhaseNone}};
        sc.routes.push_back(ca);
    }
    ProtocolParams p{0.06, 1.0};
    sc.interference = p;
    return sc;
}

}  // namespace

TEST_CASE("two-node network delivers every slot") {
    Scenario sc = two_node_scenario();
    const uint64_t T = 1000;
    RunTrace tr = run(sc, T, 1);
    CHECK(tr.delivered_window == T - tr.warmup);
    Metrics m = measure(tr, 1.0);
    CHECK(m.Y == doctest::Approx(1.0));
    CHECK(m.k == doctest::Approx(1.0));
    CHECK(m.eta == doctest::Approx(1.0));
    CHECK(m.residual == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.stable);
}

TEST_CASE("three-node chain settles at half rate with k = 2") {
    Scenario sc = chain_scenario();
    const uint64_t T = 2000;
    RunTrace tr = run(sc, T, 1);
    Metrics m = measure(tr, 1.0);
    CHECK(m.Y == doctest::Approx(1.0).epsilon(0.01));
    CHECK(m.k == doctest::Approx(2.0));
    CHECK(m.eta == doctest::Approx(0.5).epsilon(0.01));
    // identity: eta = Y W / k = 0.5 exactly at steady state
    CHECK(m.residual <= 0.01);
    CHECK(m.stable);
}

TEST_CASE("conservation identity holds exactly") {
    // enforced inside run(); also assert the recorded pieces directly
    Scenario sc = chain_scenario();
    RunTrace tr = run(sc, 777, 3);
    CHECK(tr.conservation_ok());
    CHECK(tr.sum_Yt == tr.hops_delivered_total + tr.inflight_transmissions_end);

    Scenario uni = make_cell_tdma_scenario(120, 5);
    RunTrace gt = run(uni, 3000, 5);
    CHECK(gt.conservation_ok());

    Scenario mc = make_multicast_scenario(300, 6, 6, {});
    RunTrace mt = run(mc, 3000, 6);
    CHECK(mt.conservation_ok());

    Scenario mob = make_mobile_scenario(60, 7);
    RunTrace bt = run(mob, 2000, 7);
    CHECK(bt.conservation_ok());
}

TEST_CASE("identical scenario, horizon and seed reproduce the trace") {
    Scenario a = make_cell_tdma_scenario(150, 11);
    Scenario b = make_cell_tdma_scenario(150, 11);
    RunTrace ta = run(a, 4000, 11);
    RunTrace tb = run(b, 4000, 11);
    CHECK(ta.per_slot_active == tb.per_slot_active);
    CHECK(ta.in_transit == tb.in_transit);
    CHECK(ta.delivered_per_flow == tb.delivered_per_flow);

    Scenario ma = make_mobile_scenario(50, 13);
    Scenario mb = make_mobile_scenario(50, 13);
    RunTrace tma = run(ma, 1500, 13);
    RunTrace tmb = run(mb, 1500, 13);
    CHECK(tma.per_slot_active == tmb.per_slot_active);
    CHECK(tma.delivered_per_flow == tmb.delivered_per_flow);
}

TEST_CASE("stability_check verdicts") {
    SUBCASE("zero traffic is stable with zero slope") {
        Scenario sc = two_node_scenario();
        sc.injection.mode = Injection::Mode::FixedRate;
        sc.injection.rate = 0.0;  // no packets ever
        // rate 0 never injects; run directly and inspect the flat q_t
        RunTrace tr = run(sc, 400, 1);
        StabilityVerdict v = stability_check(tr);
        CHECK(v.slope == doctest::Approx(0.0));
        CHECK(v.stable);
    }

    SUBCASE("overload drives the backlog slope positive") {
        Scenario sc = chain_scenario();
        sc.injection.mode = Injection::Mode::FixedRate;
        sc.injection.rate = 1.0;  // 2x the 0.5 service rate
        RunTrace tr = run(sc, 2000, 1);
        StabilityVerdict v = stability_check(tr);
        CHECK(v.slope > v.epsilon);
        CHECK_FALSE(v.stable);
    }
}

TEST_CASE("binary_search_throughput brackets the known chain capacities") {
    SUBCASE("direct link sustains full rate") {
        Scenario sc = two_node_scenario();
        double rate = binary_search_throughput(sc, 2000, 0.05, 1);
        CHECK(rate == doctest::Approx(1.0));
    }

    SUBCASE("opposed chain flows share the middle relay") {
        Scenario sc = chain_scenario(true);
        double rate = binary_search_throughput(sc, 4000, 0.05, 1);
        // B serves two flows, two transmissions each delivery: ~0.25/flow
        CHECK(rate == doctest::Approx(0.25).epsilon(0.15));
    }

    SUBCASE("search result is consistent with saturated throughput") {
        Scenario sc = chain_scenario();
        double rate = binary_search_throughput(sc, 4000, 0.05, 1);
        RunTrace tr = run(sc, 4000, 1);
        Metrics m = measure(tr, 1.0);
        CHECK(rate <= m.lambda_mean * 1.1);
    }
}

TEST_CASE("measure rejects empty windows and zero deliveries") {
    Scenario sc = two_node_scenario();
    sc.injection.mode = Injection::Mode::FixedRate;
    sc.injection.rate = 0.0;
    RunTrace tr = run(sc, 300, 1);
    CHECK_THROWS_AS(measure(tr, 1.0), MetricsUndefinedError);
}

TEST_CASE("identity residual shrinks with horizon and warmup") {
    // residual(T = 2T0) <= residual(T0) on seed average; warmup removal
    // biases the estimate upward
    double r_short = 0, r_long = 0, r_nowarm = 0;
    const int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
        Scenario sc = make_cell_tdma_scenario(150, 200 + s);
        RunTrace t1 = run(sc, 4000, 200 + s);
        RunTrace t2 = run(sc, 8000, 200 + s);
        r_short += measure(t1, 1.0).residual;
        r_long += measure(t2, 1.0).residual;
        Scenario nw = make_cell_tdma_scenario(150, 200 + s);
        nw.warmup_frac = 0.0;
        RunTrace t3 = run(nw, 4000, 200 + s);
        r_nowarm += measure(t3, 1.0).residual;
    }
    CHECK(r_long / seeds <= r_short / seeds + 1e-9);
    CHECK(r_nowarm / seeds > r_short / seeds);
}

TEST_CASE("mobile runs keep k inside the two-hop bound") {
    Scenario sc = make_mobile_scenario(120, 17);
    RunTrace tr = run(sc, 6000, 17);
    Metrics m = measure(tr, 1.0);
    CHECK(m.k >= 1.0);
    CHECK(m.k <= 2.0);
    CHECK(m.stable);
}

TEST_CASE("protocol-model runs respect the proven bounds") {
    Scenario sc = make_cell_tdma_scenario(200, 23);
    const auto& p = std::get<ProtocolParams>(sc.interference);
    double bound = 16.0 / (M_PI * p.guard * p.guard * p.range * p.range);
    RunTrace tr = run(sc, 4000, 23);
    CHECK(double(tr.max_Yt) <= bound);
    // corner-pair floor on k (weak, but proven)
    Metrics m = measure(tr, 1.0);
    CHECK(m.k >= std::sqrt(2.0) / (256.0 * p.range));
}

TEST_CASE("static route hops stay within the scenario range") {
    Scenario sc = make_cell_tdma_scenario(250, 31);
    const auto& p = std::get<ProtocolParams>(sc.interference);
    auto pos = sc.deployment.positions();
    for (const Route& r : sc.routes) {
        for (const PathHop& h : r.hops) {
            CHECK(dist(pos[h.tx], pos[h.rx]) <= p.range + 1e-12);
        }
    }
}

TEST_CASE("fairness diagnostic is reported, not asserted") {
    Scenario sc = make_cell_tdma_scenario(150, 29);
    RunTrace tr = run(sc, 6000, 29);
    Metrics m = measure(tr, 1.0);
    CHECK(m.fairness_ratio >= 0.0);  // 0 means a starved flow existed
}
