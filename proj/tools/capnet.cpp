// capnet: capacity estimation for static and mobile multi-hop networks.
// Subcommands: run (single scenario), sweep (parameter sweep + fit),
// bounds (closed-form calculators), check (acceptance suite).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "capnet/acceptance.hpp"
#include "capnet/config.hpp"
#include "capnet/errors.hpp"
#include "capnet/io.hpp"

namespace fs = std::filesystem;
using namespace capnet;

namespace {

uint32_t resolve_jobs(uint32_t jobs_flag) {
    if (jobs_flag > 0) return jobs_flag;
    if (const char* env = std::getenv("CAPNET_JOBS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<uint32_t>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 2;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw SimError("cannot write " + path.string());
    f << content;
}

int cmd_run(const std::string& config_path, std::optional<uint64_t> seed_override,
            const std::string& out_dir) {
    RunConfig cfg = parse_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    Scenario sc = scenario_from_config(cfg);
    uint64_t T = horizon_from_config(cfg);
    RunTrace trace = run(sc, T, cfg.seed);
    Metrics m = measure(trace, sc.link_rate);
    auto summary = run_summary_json(sc, trace, m);

    fs::path out(out_dir);
    write_file(out / "summary.json", summary.dump(2) + "\n");
    write_file(out / "trace.csv", trace_to_csv(trace));
    write_file(out / "deployment.csv", deployment_to_csv(sc.deployment));
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, std::optional<uint64_t> seed_override,
              const std::string& out_dir, uint32_t jobs) {
    RunConfig cfg = parse_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    SweepSpec spec = sweep_spec_from_config(cfg);
    auto table = sweep(spec, jobs);

    fs::path out(out_dir);
    write_file(out / "sweep.csv", sweep_table_to_csv(table));

    // family-specific scaling fit when the family has one
    std::optional<ScalingFamily> fam;
    switch (spec.family) {
        case SchedulerId::CellTdmaStraightline: fam = ScalingFamily::CellTdma; break;
        case SchedulerId::TwoHopMobile: fam = ScalingFamily::Mobile; break;
        case SchedulerId::MulticastCds: fam = ScalingFamily::Multicast; break;
        case SchedulerId::Hybrid: fam = ScalingFamily::Hybrid; break;
        default: break;
    }
    if (fam) {
        ScalingReport rep = scaling_check(*fam, table);
        if (cfg.target_slope) rep.target_slope = *cfg.target_slope;
        if (cfg.tolerance) rep.tolerance = *cfg.tolerance;
        rep.pass = std::abs(rep.fit.slope - rep.target_slope) <= rep.tolerance &&
                   (rep.min_r2 <= 0.0 || rep.fit.r2 >= rep.min_r2) && rep.notes.empty();
        auto j = scaling_report_to_json(rep);
        write_file(out / "fit.json", j.dump(2) + "\n");
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "rows: " << table.size() << " -> " << (out / "sweep.csv").string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capacity simulator and estimator for wireless multi-hop networks"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", format = "json";
    uint32_t jobs_flag = 0;
    std::optional<uint64_t> seed;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* copt = sub->add_option("--config", config_path, "config file (key = value)");
        if (needs_config) copt->required();
        sub->add_option("--seed", seed, "override [engine] seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--jobs", jobs_flag, "worker threads (env CAPNET_JOBS, then cores)");
        sub->add_option("--format", format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    auto* s_run = app.add_subcommand("run", "run one scenario; writes summary JSON + trace CSV");
    add_common(s_run, true);

    auto* s_sweep = app.add_subcommand("sweep", "run a parameter sweep; writes table CSV + fit JSON");
    add_common(s_sweep, true);

    auto* s_bounds = app.add_subcommand("bounds", "closed-form bound calculators");
    double b_r = -1.0, b_delta = 1.0, b_w = 1.0, b_area = 1.0;
    uint32_t b_n = 1000, b_m = 0;
    s_bounds->add_option("--n", b_n, "node count");
    s_bounds->add_option("--r", b_r, "transmission range (required)");
    s_bounds->add_option("--delta", b_delta, "protocol guard");
    s_bounds->add_option("--w", b_w, "link rate W");
    s_bounds->add_option("--m", b_m, "infrastructure count (optional)");
    s_bounds->add_option("--area", b_area, "deployment area");

    auto* s_check = app.add_subcommand("check", "run the acceptance suite; exit 0 iff all pass");
    s_check->add_option("--jobs", jobs_flag, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (s_run->parsed()) return cmd_run(config_path, seed, out_dir);
        if (s_sweep->parsed()) return cmd_sweep(config_path, seed, out_dir, resolve_jobs(jobs_flag));
        if (s_bounds->parsed()) {
            if (b_r <= 0.0) {
                std::cerr << "bounds: --r is required and must be > 0\n";
                return 2;
            }
            BoundReport rep = make_bound_report(b_n, b_r, b_delta, b_w, b_m, b_area);
            auto j = bound_report_to_json(rep);
            if (format == "csv") {
                std::string header, row;
                for (auto it = j.begin(); it != j.end(); ++it) {
                    header += (header.empty() ? "" : ",") + it.key();
                    row += (row.empty() ? "" : ",") + it.value().dump();
                }
                std::cout << header << "\n" << row << "\n";
            } else {
                std::cout << j.dump(2) << "\n";
            }
            return 0;
        }
        if (s_check->parsed()) {
            auto results = run_acceptance(resolve_jobs(jobs_flag), std::cout);
            return all_passed(results) ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error:\n" << e.what() << "\n";
        return 2;
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
