#include "capnet/io.hpp"

#include <sstream>

namespace capnet {

using nlohmann::json;

std::string trace_to_csv(const RunTrace& trace) {
    std::ostringstream os;
    os << "slot,Y_t,q_t\n";
    for (size_t t = 0; t < trace.per_slot_active.size(); ++t) {
        os << t << ',' << trace.per_slot_active[t] << ',' << trace.in_transit[t] << '\n';
    }
    return os.str();
}

json metrics_to_json(const Metrics& m) {
    return json{{"eta", m.eta},
                {"lambda_min", m.lambda_min},
                {"lambda_mean", m.lambda_mean},
                {"lambda_max", m.lambda_max},
                {"Y", m.Y},
                {"k", m.k},
                {"residual", m.residual},
                {"fairness_ratio", m.fairness_ratio},
                {"stable", m.stable},
                {"q_slope", m.q_slope},
                {"delivered", m.delivered},
                {"W", m.W}};
}

Metrics metrics_from_json(const json& j) {
    Metrics m;
    m.eta = j.at("eta").get<double>();
    m.lambda_min = j.at("lambda_min").get<double>();
    m.lambda_mean = j.at("lambda_mean").get<double>();
    m.lambda_max = j.at("lambda_max").get<double>();
    m.Y = j.at("Y").get<double>();
    m.k = j.at("k").get<double>();
    m.residual = j.at("residual").get<double>();
    m.fairness_ratio = j.at("fairness_ratio").get<double>();
    m.stable = j.at("stable").get<bool>();
    m.q_slope = j.at("q_slope").get<double>();
    m.delivered = j.at("delivered").get<uint64_t>();
    m.W = j.at("W").get<double>();
    return m;
}

json bound_report_to_json(const BoundReport& r) {
    json j{{"n", r.n},
           {"r", r.range},
           {"delta", r.delta},
           {"W", r.W},
           {"area", r.area},
           {"packing_Y_max", r.packing_Y_max},
           {"corner_k_min", r.corner_k_min},
           {"lambda_upper_bound", r.lambda_upper_bound}};
    // order estimates only meaningful with infrastructure present
    if (r.m >= 1) {
        j["M"] = r.m;
        j["hybrid_eta_fixed_range_order_estimate"] = r.hybrid_eta_fixed;
        j["hybrid_eta_shrunk_range_order_estimate"] = r.hybrid_eta_shrunk;
    }
    return j;
}

json run_summary_json(const Scenario& sc, const RunTrace& trace, const Metrics& m) {
    json seeds = json::object();
    for (const auto& [name, value] : sc.derived_seeds) seeds[name] = value;

    uint32_t infra = static_cast<uint32_t>(sc.deployment.size() - sc.deployment.ordinary_count());
    json j{{"trace_version", kTraceVersion},
           {"scheduler", scheduler_name(sc.scheduler)},
           {"n", sc.deployment.ordinary_count()},
           {"M", infra},
           {"flows", sc.flows.flows.size()},
           {"T", trace.horizon},
           {"warmup", trace.warmup},
           {"seed", trace.seed},
           {"derived_seeds", seeds},
           {"deployment_retries", sc.deployment_retries},
           {"W", sc.link_rate},
           {"max_Yt", trace.max_Yt},
           {"conservation_ok", trace.conservation_ok()},
           {"metrics", metrics_to_json(m)}};
    if (sc.connectivity_range > 0.0) j["critical_range"] = sc.connectivity_range;
    if (const auto* p = std::get_if<ProtocolParams>(&sc.interference)) {
        j["interference"] = {{"model", "protocol"}, {"range", p->range}, {"guard", p->guard}};
        j["packing_Y_max"] =
            packing_upper_bound(p->guard, p->range, sc.deployment.area_side * sc.deployment.area_side);
    } else {
        const auto& phys = std::get<PhysicalParams>(sc.interference);
        j["interference"] = {{"model", "physical"},
                             {"alpha", phys.path_loss_exponent},
                             {"beta", phys.sinr_threshold},
                             {"noise", phys.noise},
                             {"gain", phys.gain == GainModel::PowerLaw ? "powerlaw" : "attenuation"}};
    }
    if (sc.scheduler == SchedulerId::Highway4Phase) {
        // the reuse parameter each phase derived from its measured max hop
        j["phase_reuse_d"] = {sc.phase_tdma[0].reuse_parameter, sc.phase_tdma[1].reuse_parameter,
                              sc.phase_tdma[2].reuse_parameter, sc.phase_tdma[3].reuse_parameter};
        j["phase_beta"] = sc.phase_beta;
    }
    return j;
}

}  // namespace capnet
