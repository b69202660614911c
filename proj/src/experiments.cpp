#include "capnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "capnet/errors.hpp"
#include "capnet/rng.hpp"

namespace capnet {

namespace {

const char* param_name(SweepParam p) {
    switch (p) {
        case SweepParam::N: return "n";
        case SweepParam::L: return "l";
        case SweepParam::M: return "M";
    }
    return "?";
}

SweepRow run_point(const SweepSpec& spec, uint32_t value, uint64_t seed) {
    SweepRow row;
    row.family = scheduler_name(spec.family);
    row.param_name = param_name(spec.param);
    row.param_value = value;
    row.seed = seed;
    row.n = spec.param == SweepParam::N ? value : spec.n_fixed;
    row.l = spec.param == SweepParam::L ? value : spec.l_fixed;
    row.m = spec.param == SweepParam::M ? value : spec.m_fixed;

    try {
        Scenario sc;
        switch (spec.family) {
            case SchedulerId::CellTdmaStraightline:
                sc = make_cell_tdma_scenario(row.n, seed, spec.cell_tdma);
                row.m = 0;
                break;
            case SchedulerId::Highway4Phase:
                sc = make_highway_scenario(row.n, seed, spec.highway);
                row.m = 0;
                break;
            case SchedulerId::TwoHopMobile:
                sc = make_mobile_scenario(row.n, seed, spec.mobile);
                row.m = 0;
                break;
            case SchedulerId::MulticastCds:
                sc = make_multicast_scenario(row.n, row.l, seed, spec.multicast);
                row.m = 0;
                break;
            case SchedulerId::Hybrid:
                sc = make_hybrid_scenario(row.n, row.m, seed, spec.hybrid);
                break;
            case SchedulerId::ManualGreedy:
                throw InvalidScenarioError("sweep: manual-greedy has no builder");
        }
        uint64_t T = spec.horizon_override ? *spec.horizon_override
                                           : default_horizon(spec.family, row.n);
        row.T = T;
        row.W = sc.link_rate;
        RunTrace tr = run(sc, T, seed);
        Metrics m = measure(tr, sc.link_rate);
        row.Y = m.Y;
        row.k = m.k;
        row.eta = m.eta;
        row.lambda_mean = m.lambda_mean;
        row.lambda_min = m.lambda_min;
        row.lambda_max = m.lambda_max;
        row.residual = m.residual;
        row.stable = m.stable;
        row.max_Yt = tr.max_Yt;
        if (const auto* p = std::get_if<ProtocolParams>(&sc.interference)) {
            double area = sc.deployment.area_side * sc.deployment.area_side;
            row.packing_bound = packing_upper_bound(p->guard, p->range, area);
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec, uint32_t jobs) {
    if (spec.values.size() < 3)
        throw InvalidScenarioError("sweep: need >= 3 swept values");
    if (spec.repetitions < 3)
        throw InvalidScenarioError("sweep: need >= 3 repetitions");

    struct Job {
        uint32_t value;
        uint64_t seed;
    };
    std::vector<Job> todo;
    for (size_t vi = 0; vi < spec.values.size(); ++vi) {
        for (uint32_t rep = 0; rep < spec.repetitions; ++rep) {
            // collision-free counter-derived seeds
            uint64_t seed = mix_seed(spec.base_seed, vi * spec.repetitions + rep + 1);
            todo.push_back({spec.values[vi], seed});
        }
    }
    std::vector<SweepRow> rows(todo.size());
    jobs = std::max<uint32_t>(1, std::min<uint32_t>(jobs, static_cast<uint32_t>(todo.size())));
    if (jobs == 1) {
        for (size_t i = 0; i < todo.size(); ++i)
            rows[i] = run_point(spec, todo[i].value, todo[i].seed);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= todo.size()) return;
                rows[i] = run_point(spec, todo[i].value, todo[i].seed);
            }
        };
        std::vector<std::thread> pool;
        for (uint32_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

std::string sweep_table_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "family,param_name,param_value,seed,n,M,l,T,W,Y,k,eta,lambda_mean,lambda_min,"
          "lambda_max,residual,stable,max_Yt,packing_bound,error\n";
    for (const auto& r : rows) {
        os << r.family << ',' << r.param_name << ',' << r.param_value << ',' << r.seed << ','
           << r.n << ',' << r.m << ',' << r.l << ',' << r.T << ',' << r.W << ',' << r.Y << ','
           << r.k << ',' << r.eta << ',' << r.lambda_mean << ',' << r.lambda_min << ','
           << r.lambda_max << ',' << r.residual << ',' << (r.stable ? 1 : 0) << ',' << r.max_Yt
           << ',' << r.packing_bound << ',' << r.error << '\n';
    }
    return os.str();
}

FitResult loglog_slope(const std::vector<SweepRow>& table,
                       const std::function<double(const SweepRow&)>& x_of,
                       const std::function<double(const SweepRow&)>& y_of) {
    // group usable rows by swept value
    std::map<double, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const SweepRow& r : table) {
        if (!r.error.empty() || !r.stable) continue;
        double x = x_of(r), y = y_of(r);
        if (!(x > 0.0) || !(y > 0.0)) continue;  // excluded with warning upstream
        groups[r.param_value].first.push_back(x);
        groups[r.param_value].second.push_back(y);
    }
    FitResult fit;
    std::vector<double> lx, ly;
    for (auto& [value, xy] : groups) {
        auto mean = [](const std::vector<double>& v) {
            double s = 0;
            for (double e : v) s += e;
            return s / static_cast<double>(v.size());
        };
        double mx = mean(xy.first), my = mean(xy.second);
        fit.x_means.push_back(mx);
        fit.y_means.push_back(my);
        lx.push_back(std::log(mx));
        ly.push_back(std::log(my));
    }
    const size_t m = lx.size();
    if (m < 3) throw FitUndefinedError("loglog_slope: fewer than 3 usable points");
    fit.points = m;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;

    double ss_res = 0, ss_tot = 0, ybar = sy / m;
    for (size_t i = 0; i < m; ++i) {
        double pred = fit.intercept + fit.slope * lx[i];
        ss_res += (ly[i] - pred) * (ly[i] - pred);
        ss_tot += (ly[i] - ybar) * (ly[i] - ybar);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (m > 2) {
        double se2 = ss_res / static_cast<double>(m - 2) / (sxx - sx * sx / m);
        fit.slope_stderr = std::sqrt(std::max(0.0, se2));
    }
    return fit;
}

const char* scaling_family_name(ScalingFamily f) {
    switch (f) {
        case ScalingFamily::CellTdma: return "cell-tdma";
        case ScalingFamily::Mobile: return "mobile";
        case ScalingFamily::Multicast: return "multicast";
        case ScalingFamily::Hybrid: return "hybrid";
    }
    return "?";
}

SweepSpec default_sweep_spec(ScalingFamily family, uint64_t base_seed) {
    SweepSpec s;
    s.base_seed = base_seed;
    s.repetitions = 5;
    switch (family) {
        case ScalingFamily::CellTdma:
            s.family = SchedulerId::CellTdmaStraightline;
            s.param = SweepParam::N;
            s.values = {250, 500, 1000, 2000, 4000};
            break;
        case ScalingFamily::Mobile:
            s.family = SchedulerId::TwoHopMobile;
            s.param = SweepParam::N;
            s.values = {250, 500, 1000, 2000};
            break;
        case ScalingFamily::Multicast:
            s.family = SchedulerId::MulticastCds;
            s.param = SweepParam::L;
            s.values = {4, 8, 16, 32, 64};
            s.n_fixed = 4000;
            break;
        case ScalingFamily::Hybrid:
            s.family = SchedulerId::Hybrid;
            s.param = SweepParam::M;
            s.values = {16, 32, 64, 128};
            s.n_fixed = 2000;
            break;
    }
    return s;
}

ScalingReport scaling_check(ScalingFamily family, const std::vector<SweepRow>& table) {
    ScalingReport rep;
    rep.family = family;
    switch (family) {
        case ScalingFamily::CellTdma:
            rep.target_slope = -1.0;
            rep.tolerance = 0.15;
            rep.min_r2 = 0.95;
            rep.fit = loglog_slope(
                table,
                [](const SweepRow& r) { return std::sqrt(r.n * std::log(double(r.n))); },
                [](const SweepRow& r) { return r.lambda_mean; });
            break;
        case ScalingFamily::Mobile: {
            rep.target_slope = 0.0;
            rep.tolerance = 0.15;
            rep.fit = loglog_slope(
                table, [](const SweepRow& r) { return double(r.n); },
                [](const SweepRow& r) { return r.lambda_mean; });
            // hard bound from the two-hop policy: 1 <= k <= 2 in every run
            for (const SweepRow& r : table) {
                if (!r.error.empty()) continue;
                if (r.k < 1.0 || r.k > 2.0 + 1e-9) {
                    rep.notes = "k out of [1,2] at n=" + std::to_string(r.n);
                }
            }
            break;
        }
        case ScalingFamily::Multicast:
            rep.target_slope = -0.5;
            rep.tolerance = 0.15;
            rep.fit = loglog_slope(
                table, [](const SweepRow& r) { return double(r.l); },
                [](const SweepRow& r) { return r.eta; });
            break;
        case ScalingFamily::Hybrid:
            rep.target_slope = 1.0;
            rep.tolerance = 0.2;
            rep.fit = loglog_slope(
                table, [](const SweepRow& r) { return double(r.m); },
                [](const SweepRow& r) { return r.eta; });
            break;
    }
    bool slope_ok = std::abs(rep.fit.slope - rep.target_slope) <= rep.tolerance;
    bool r2_ok = rep.min_r2 <= 0.0 || rep.fit.r2 >= rep.min_r2;
    rep.pass = slope_ok && r2_ok && rep.notes.empty();
    return rep;
}

nlohmann::json scaling_report_to_json(const ScalingReport& r) {
    return nlohmann::json{{"family", scaling_family_name(r.family)},
                          {"slope", r.fit.slope},
                          {"stderr", r.fit.slope_stderr},
                          {"r2", r.fit.r2},
                          {"points", r.fit.points},
                          {"target", r.target_slope},
                          {"tolerance", r.tolerance},
                          {"min_r2", r.min_r2},
                          {"verdict", r.pass ? "pass" : "fail"},
                          {"notes", r.notes}};
}

}  // namespace capnet
