#include "capnet/acceptance.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include "capnet/config.hpp"
#include "capnet/errors.hpp"
#include "capnet/io.hpp"
#include "capnet/rng.hpp"

namespace capnet {

namespace {

using Clock = std::chrono::steady_clock;

struct IdentityRun {
    std::string family;
    uint64_t seed;
    Metrics metrics;
    uint32_t max_Yt;
    double packing_bound = 0.0;  // 0 for physical-model runs
    double range = 0.0;          // protocol-model range, 0 otherwise
    std::string error;
};

// criterion-1 scenario catalog: family, builder, horizon
std::vector<IdentityRun> run_identity_matrix(uint32_t jobs) {
    struct Job {
        std::string family;
        uint64_t seed;
        int kind;
    };
    std::vector<Job> jobs_list;
    const uint64_t base = 20240901;
    for (int kind = 0; kind < 5; ++kind) {
        for (uint64_t s = 0; s < 5; ++s) {
            static const char* names[] = {"cell-tdma-straightline", "highway-4phase",
                                          "two-hop-mobile", "multicast-cds", "hybrid"};
            jobs_list.push_back({names[kind], mix_seed(base, kind * 16 + s), kind});
        }
    }
    std::vector<IdentityRun> out(jobs_list.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= jobs_list.size()) return;
            const Job& job = jobs_list[i];
            IdentityRun r;
            r.family = job.family;
            r.seed = job.seed;
            try {
                Scenario sc;
                uint64_t T = 0;
                switch (job.kind) {
                    case 0:
                        sc = make_cell_tdma_scenario(500, job.seed);
                        T = default_horizon(SchedulerId::CellTdmaStraightline, 500);
                        break;
                    case 1:
                        sc = make_highway_scenario(2500, job.seed);
                        T = default_horizon(SchedulerId::Highway4Phase, 2500);
                        break;
                    case 2:
                        sc = make_mobile_scenario(500, job.seed);
                        T = default_horizon(SchedulerId::TwoHopMobile, 500);
                        break;
                    case 3:
                        sc = make_multicast_scenario(1000, 8, job.seed);
                        T = default_horizon(SchedulerId::MulticastCds, 1000);
                        break;
                    case 4:
                        sc = make_hybrid_scenario(1000, 32, job.seed);
                        T = default_horizon(SchedulerId::Hybrid, 1000);
                        break;
                }
                RunTrace tr = run(sc, T, job.seed);
                r.metrics = measure(tr, sc.link_rate);
                r.max_Yt = tr.max_Yt;
                if (const auto* p = std::get_if<ProtocolParams>(&sc.interference)) {
                    double area = sc.deployment.area_side * sc.deployment.area_side;
                    r.packing_bound = packing_upper_bound(p->guard, p->range, area);
                    r.range = p->range;
                }
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            out[i] = r;
        }
    };
    std::vector<std::thread> pool;
    for (uint32_t j = 0; j < std::max<uint32_t>(1, jobs); ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

// protocol-model pairwise feasibility re-implementation, independent of
// interference.cpp, for the oracle-agreement criterion
bool pairwise_feasible(const std::vector<Link>& links, const std::vector<Point>& pos,
                       double range, double guard) {
    for (size_t i = 0; i < links.size(); ++i) {
        for (size_t j = 0; j < links.size(); ++j) {
            if (links[i].tx == links[j].tx && i != j) return false;
        }
        double dx = pos[links[i].tx].x - pos[links[i].rx].x;
        double dy = pos[links[i].tx].y - pos[links[i].rx].y;
        if (std::sqrt(dx * dx + dy * dy) > range) return false;
        if (links[i].tx == links[i].rx) return false;
    }
    for (size_t i = 0; i < links.size(); ++i) {
        for (size_t j = 0; j < links.size(); ++j) {
            if (i == j) continue;
            // half duplex
            if (links[j].tx == links[i].rx) return false;
            double dx = pos[links[j].tx].x - pos[links[i].rx].x;
            double dy = pos[links[j].tx].y - pos[links[i].rx].y;
            if (std::sqrt(dx * dx + dy * dy) < (1.0 + guard) * range) return false;
        }
    }
    return true;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

std::vector<CriterionResult> run_acceptance(uint32_t jobs, std::ostream& log) {
    std::vector<CriterionResult> results;
    auto record = [&](int id, const std::string& name, bool pass, const std::string& detail,
                      double secs) {
        results.push_back({id, name, pass, detail, secs});
        log << (pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << detail << "  ("
            << fmt(secs) << " s)\n";
        log.flush();
    };
    auto timed = [&](auto&& fn) {
        auto t0 = Clock::now();
        fn();
        return std::chrono::duration<double>(Clock::now() - t0).count();
    };

    // ---- criteria 1 & 2: identity matrix + packing bound -------------------
    std::vector<IdentityRun> identity;
    double secs = timed([&] { identity = run_identity_matrix(jobs); });
    {
        bool pass = true;
        std::ostringstream detail;
        double worst_resid = 0.0;
        for (const auto& r : identity) {
            if (!r.error.empty()) {
                pass = false;
                detail << r.family << " seed " << r.seed << " error: " << r.error << "; ";
                continue;
            }
            worst_resid = std::max(worst_resid, r.metrics.residual);
            if (!r.metrics.stable || r.metrics.residual > 0.02) {
                pass = false;
                detail << r.family << " stable=" << r.metrics.stable
                       << " residual=" << fmt(r.metrics.residual) << "; ";
            }
        }
        if (pass) detail << "25/25 stable, max residual " << fmt(worst_resid);
        record(1, "capacity identity (5 families x 5 seeds, residual <= 0.02)", pass,
               detail.str(), secs);
    }
    {
        bool pass = true;
        std::ostringstream detail;
        uint32_t checked = 0;
        for (const auto& r : identity) {
            if (!r.error.empty() || r.packing_bound <= 0.0) continue;
            ++checked;
            if (static_cast<double>(r.max_Yt) > r.packing_bound) {
                pass = false;
                detail << r.family << " max_Yt=" << r.max_Yt << " > bound "
                       << fmt(r.packing_bound) << "; ";
            }
        }
        // corner-pair sanity floor on k for the unicast unit-square family
        for (const auto& r : identity) {
            if (!r.error.empty() || r.range <= 0.0) continue;
            if (r.family != "cell-tdma-straightline") continue;
            if (r.metrics.k < capnet::corner_k_min(r.range)) {
                pass = false;
                detail << r.family << " k=" << fmt(r.metrics.k) << " below corner bound; ";
            }
        }
        if (pass) detail << checked << " protocol-model runs, zero violations";
        record(2, "packing bound max_t Y_t <= 16*area/(pi delta^2 r^2); corner k floor", pass,
               detail.str(), 0.0);
    }

    // ---- criterion 3: unicast cell-TDMA scaling ------------------------------
    {
        ScalingReport rep;
        double s3 = timed([&] {
            auto spec = default_sweep_spec(ScalingFamily::CellTdma, 31001);
            auto table = sweep(spec, jobs);
            rep = scaling_check(ScalingFamily::CellTdma, table);
        });
        record(3, "unicast scaling: slope(log lambda vs log sqrt(n ln n)) = -1 +- 0.15, R2 >= 0.95",
               rep.pass, "slope=" + fmt(rep.fit.slope) + " r2=" + fmt(rep.fit.r2), s3);
    }

    // ---- criterion 4: mobile Theta(1) --------------------------------------
    {
        ScalingReport rep;
        bool k_ok = true;
        std::string k_note;
        double s4 = timed([&] {
            auto spec = default_sweep_spec(ScalingFamily::Mobile, 31002);
            auto table = sweep(spec, jobs);
            rep = scaling_check(ScalingFamily::Mobile, table);
            for (const auto& row : table) {
                if (row.error.empty() && (row.k < 1.0 || row.k > 2.0 + 1e-9)) {
                    k_ok = false;
                    k_note = " k=" + fmt(row.k) + " at n=" + std::to_string(row.n);
                }
            }
        });
        record(4, "mobile Theta(1): slope in [-0.15, 0.15], k in [1,2] every run",
               rep.pass && k_ok, "slope=" + fmt(rep.fit.slope) + k_note, s4);
    }

    // ---- criterion 5: multicast scaling + saturation ------------------------
    {
        ScalingReport rep;
        double ratio = 0.0;
        bool sat_ok = false;
        double s5 = timed([&] {
            auto spec = default_sweep_spec(ScalingFamily::Multicast, 31003);
            auto table = sweep(spec, jobs);
            rep = scaling_check(ScalingFamily::Multicast, table);

            // saturation regime: eta at l = n/2 vs l = n/4
            SweepSpec sat = spec;
            sat.values = {1000, 1500, 2000};  // middle value only aids the >=3 rule
            sat.repetitions = 3;
            sat.base_seed = 31004;
            auto sat_table = sweep(sat, jobs);
            double eta_lo = 0, eta_hi = 0;
            uint32_t c_lo = 0, c_hi = 0;
            for (const auto& row : sat_table) {
                if (!row.error.empty()) continue;
                if (row.l == 1000) {
                    eta_lo += row.eta;
                    ++c_lo;
                }
                if (row.l == 2000) {
                    eta_hi += row.eta;
                    ++c_hi;
                }
            }
            if (c_lo && c_hi) {
                ratio = (eta_hi / c_hi) / (eta_lo / c_lo);
                sat_ok = ratio >= 0.8 && ratio <= 1.25;
            }
        });
        record(5, "multicast: slope(log eta vs log l) = -0.5 +- 0.15; saturation ratio in [0.8,1.25]",
               rep.pass && sat_ok,
               "slope=" + fmt(rep.fit.slope) + " saturation_ratio=" + fmt(ratio), s5);
    }

    // ---- criterion 6: hybrid linear in M ------------------------------------
    {
        ScalingReport rep;
        double s6 = timed([&] {
            auto spec = default_sweep_spec(ScalingFamily::Hybrid, 31005);
            auto table = sweep(spec, jobs);
            rep = scaling_check(ScalingFamily::Hybrid, table);
        });
        record(6, "hybrid: slope(log eta vs log M) = 1.0 +- 0.2", rep.pass,
               "slope=" + fmt(rep.fit.slope), s6);
    }

    // ---- criterion 7: oracle equivalence ------------------------------------
    {
        bool pass = true;
        std::ostringstream detail;
        double s7 = timed([&] {
            ProtocolParams p;
            p.range = 0.2;
            p.guard = 1.0;
            InterferenceModel model = p;
            uint32_t greedy_total = 0, brute_total = 0;
            for (uint64_t inst = 0; inst < 100 && pass; ++inst) {
                Rng rng = Rng::derived(777000 + inst, 0x0a);
                uint32_t m = 6 + static_cast<uint32_t>(rng.below(7));  // 6..12 links
                std::vector<Point> pos;
                std::vector<Link> cands;
                for (uint32_t i = 0; i < 2 * m; ++i)
                    pos.push_back({rng.uniform01(), rng.uniform01()});
                for (uint32_t i = 0; i < m; ++i) {
                    // rx placed within range of its tx so instances are non-trivial
                    Point rx{pos[2 * i].x + rng.uniform(-0.15, 0.15),
                             pos[2 * i].y + rng.uniform(-0.15, 0.15)};
                    pos[2 * i + 1] = rx;
                    cands.push_back({2 * i, 2 * i + 1, dist(pos[2 * i], rx), false});
                }
                std::vector<int> qlens(m, 0);
                LinkSet g = greedy_feasible_set(cands, qlens, pos, model,
                                                Tiebreak::Random, 999 + inst);
                LinkSet b = max_feasible_set_bruteforce(cands, pos, model);
                if (!feasible_set(g.active, pos, model)) {
                    pass = false;
                    detail << "greedy emitted infeasible set at instance " << inst << "; ";
                }
                // maximality: no rejected candidate can be added
                for (const Link& c : cands) {
                    bool present = false;
                    for (const Link& l : g.active)
                        if (l.tx == c.tx && l.rx == c.rx) present = true;
                    if (present) continue;
                    auto extended = g.active;
                    Link cc = c;
                    extended.push_back(cc);
                    bool feas;
                    try {
                        feas = feasible_set(extended, pos, model);
                    } catch (const MalformedScheduleError&) {
                        feas = false;
                    }
                    if (feas) {
                        pass = false;
                        detail << "greedy not maximal at instance " << inst << "; ";
                        break;
                    }
                }
                if (b.active.size() < g.active.size()) {
                    pass = false;
                    detail << "brute < greedy at instance " << inst << "; ";
                }
                greedy_total += g.active.size();
                brute_total += b.active.size();
            }
            // agreement with the independent pairwise checker on one instance
            Rng rng = Rng::derived(424242, 0x0b);
            std::vector<Point> pos;
            std::vector<Link> cands;
            for (uint32_t i = 0; i < 12; ++i) {
                Point tx{rng.uniform01(), rng.uniform01()};
                Point rx{tx.x + rng.uniform(-0.15, 0.15), tx.y + rng.uniform(-0.15, 0.15)};
                pos.push_back(tx);
                pos.push_back(rx);
                cands.push_back({2 * i, 2 * i + 1, dist(tx, rx), false});
            }
            uint32_t disagreements = 0;
            for (uint32_t mask = 0; mask < (1u << 12); ++mask) {
                std::vector<Link> subset;
                for (uint32_t i = 0; i < 12; ++i)
                    if (mask & (1u << i)) subset.push_back(cands[i]);
                bool a;
                try {
                    a = feasible_set(subset, pos, model);
                } catch (const MalformedScheduleError&) {
                    a = false;
                }
                bool bb = pairwise_feasible(subset, pos, p.range, p.guard);
                if (a != bb) ++disagreements;
            }
            if (disagreements) {
                pass = false;
                detail << disagreements << " feasibility disagreements over 4096 subsets; ";
            }
            if (pass)
                detail << "100 instances, greedy sum " << greedy_total << " <= brute sum "
                       << brute_total << ", checker agrees on 4096 subsets";
        });
        record(7, "oracle equivalence: greedy maximal, brute >= greedy, checker agreement", pass,
               detail.str(), s7);
    }

    // ---- criterion 8: highway existence --------------------------------------
    {
        bool pass = true;
        std::ostringstream detail;
        double s8 = timed([&] {
            auto crossings_stats = [&](uint32_t n, uint64_t base_seed) {
                std::atomic<uint64_t> slabs{0}, with{0}, crossings{0};
                std::atomic<size_t> next{0};
                auto worker = [&]() {
                    for (;;) {
                        size_t s = next.fetch_add(1);
                        if (s >= 20) return;
                        Deployment dep =
                            place_uniform(n, std::sqrt(double(n)), mix_seed(base_seed, s));
                        CellGraph cells = build_cells(dep, 1.5);
                        auto pos = dep.positions();
                        HighwaySystem hw = find_highways(cells, dep, pos, 1.0);
                        for (uint32_t c : hw.h_crossings_per_slab) {
                            slabs++;
                            crossings += c;
                            if (c > 0) with++;
                        }
                        for (uint32_t c : hw.v_crossings_per_slab) {
                            slabs++;
                            crossings += c;
                            if (c > 0) with++;
                        }
                    }
                };
                std::vector<std::thread> pool;
                for (uint32_t j = 0; j < std::max<uint32_t>(1, jobs); ++j)
                    pool.emplace_back(worker);
                for (auto& t : pool) t.join();
                return std::tuple<double, double>(
                    double(with.load()) / double(slabs.load()),
                    double(crossings.load()) / double(slabs.load()));
            };
            auto [frac_small, mean_small] = crossings_stats(2500, 51001);
            auto [frac_big, mean_big] = crossings_stats(10000, 51002);
            pass = frac_big >= 0.99 && mean_big >= mean_small;
            detail << "fraction(n=1e4)=" << fmt(frac_big) << " mean(n=2500)=" << fmt(mean_small)
                   << " mean(n=1e4)=" << fmt(mean_big);
        });
        record(8, "highway existence: crossing fraction >= 0.99; mean nondecreasing", pass,
               detail.str(), s8);
    }

    // ---- criterion 9: closed-form calculators --------------------------------
    {
        double v1 = packing_upper_bound(1.0, 0.1, 1.0);
        double v2 = lambda_upper_bound(1000, 0.0663, 1.0, 1.0);
        bool pass = std::abs(v1 - 509.30) <= 0.01 && std::abs(v2 - 13.90) <= 0.05;
        record(9, "calculators: packing(1,0.1,1)=509.30+-0.01, gk_lambda(1000,0.0663,1,1)=13.90+-0.05",
               pass, "packing=" + fmt(v1) + " lambda_upper=" + fmt(v2), 0.0);
    }

    // ---- criterion 10: determinism --------------------------------------------
    {
        bool pass = false;
        std::string detail;
        double s10 = timed([&] {
            const std::string cfg_text =
                "[deployment]\nn = 200\n"
                "[scheduler]\nfamily = cell-tdma-straightline\n"
                "[engine]\nT = 4000\nseed = 99\n";
            auto once = [&]() {
                RunConfig cfg = parse_config_text(cfg_text, "determinism-check");
                Scenario sc = scenario_from_config(cfg);
                RunTrace tr = run(sc, horizon_from_config(cfg), cfg.seed);
                Metrics m = measure(tr, sc.link_rate);
                return run_summary_json(sc, tr, m).dump(2);
            };
            std::string a = once(), b = once();
            pass = (a == b);
            detail = pass ? "byte-identical summary JSON" : "summaries differ";
        });
        record(10, "determinism: identical config+seed produce byte-identical summary JSON", pass,
               detail, s10);
    }

    return results;
}

}  // namespace capnet
