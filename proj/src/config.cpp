#include "capnet/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "capnet/errors.hpp"

namespace capnet {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

struct RawEntry {
    std::string value;
    int line;
};

using Section = std::map<std::string, RawEntry>;

const std::map<std::string, std::vector<std::string>> kKnownKeys = {
    {"deployment", {"n", "area_side", "margin", "m", "infra_mode"}},
    {"interference",
     {"model", "guard", "alpha", "beta", "noise", "power", "processing_gain", "absorption",
      "gain", "beta_floor"}},
    {"scheduler",
     {"family", "kappa_cell", "theta", "cell_side", "kappa", "range_coeff", "regime",
      "relay_cap", "n_s"}},
    {"flows", {"kind", "n_s", "l"}},
    {"engine", {"T", "warmup_frac", "injection", "rate", "window", "seed"}},
    {"experiment", {"param", "values", "reps", "target_slope", "tolerance"}},
};

class Parser {
   public:
    explicit Parser(const std::string& origin) : origin_(origin) {}

    std::map<std::string, Section> sections;
    std::vector<std::string> errors;

    void parse(const std::string& text) {
        std::istringstream is(text);
        std::string line, section;
        int ln = 0;
        while (std::getline(is, line)) {
            ++ln;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']') {
                    err(ln, "malformed section header '" + t + "'");
                    continue;
                }
                section = trim(t.substr(1, t.size() - 2));
                if (!kKnownKeys.count(section)) {
                    err(ln, "unknown section [" + section + "]" + nearest_section(section));
                    section.clear();
                }
                continue;
            }
            size_t eq = t.find('=');
            if (eq == std::string::npos) {
                err(ln, "expected key = value, got '" + t + "'");
                continue;
            }
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (section.empty()) {
                err(ln, "key '" + key + "' outside any [section]");
                continue;
            }
            const auto& known = kKnownKeys.at(section);
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                err(ln, "unknown key '" + key + "' in [" + section + "]" + nearest_key(section, key));
                continue;
            }
            sections[section][key] = {value, ln};
        }
    }

    std::optional<RawEntry> get(const std::string& section, const std::string& key) {
        auto s = sections.find(section);
        if (s == sections.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        return k->second;
    }

    template <typename T>
    void number(const std::string& section, const std::string& key, T& out) {
        auto e = get(section, key);
        if (!e) return;
        std::istringstream is(e->value);
        T v{};
        if (!(is >> v) || !(is >> std::ws).eof()) {
            err(e->line, "key '" + key + "': expected a number, got '" + e->value + "'");
            return;
        }
        out = v;
    }

    void numbers(const std::string& section, const std::string& key, std::vector<uint32_t>& out) {
        auto e = get(section, key);
        if (!e) return;
        std::string v = e->value;
        std::replace(v.begin(), v.end(), ',', ' ');
        std::istringstream is(v);
        std::vector<uint32_t> vals;
        uint32_t x;
        while (is >> x) vals.push_back(x);
        if (!is.eof()) {
            err(e->line, "key '" + key + "': expected a list of numbers, got '" + e->value + "'");
            return;
        }
        out = vals;
    }

    void choice(const std::string& section, const std::string& key,
                const std::vector<std::pair<std::string, int>>& options, int& out) {
        auto e = get(section, key);
        if (!e) return;
        for (const auto& [name, v] : options) {
            if (e->value == name) {
                out = v;
                return;
            }
        }
        std::string opts;
        for (const auto& [name, v] : options) opts += (opts.empty() ? "" : ", ") + name;
        err(e->line, "key '" + key + "': unknown value '" + e->value + "' (expected one of: " +
                          opts + ")");
    }

    void err(int line, const std::string& msg) {
        errors.push_back(origin_ + ":" + std::to_string(line) + ": " + msg);
    }

   private:
    std::string nearest_key(const std::string& section, const std::string& key) const {
        size_t best = SIZE_MAX;
        std::string who;
        for (const auto& k : kKnownKeys.at(section)) {
            size_t d = edit_distance(key, k);
            if (d < best) {
                best = d;
                who = k;
            }
        }
        if (best <= std::max<size_t>(2, key.size() / 2)) return "; did you mean '" + who + "'?";
        return "";
    }

    std::string nearest_section(const std::string& section) const {
        size_t best = SIZE_MAX;
        std::string who;
        for (const auto& [s, keys] : kKnownKeys) {
            size_t d = edit_distance(section, s);
            if (d < best) {
                best = d;
                who = s;
            }
        }
        if (best <= 3) return "; did you mean [" + who + "]?";
        return "";
    }

    std::string origin_;
};

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    Parser p(origin);
    p.parse(text);
    RunConfig cfg;

    // [scheduler] family drives which option block other keys land in
    int family = -1;
    p.choice("scheduler", "family",
             {{"cell-tdma-straightline", 0},
              {"highway-4phase", 1},
              {"two-hop-mobile", 2},
              {"multicast-cds", 3},
              {"hybrid", 4}},
             family);
    if (family < 0) {
        if (auto e = p.get("scheduler", "family"); !e)
            p.errors.push_back(origin + ": missing required key 'family' in [scheduler]");
    } else {
        cfg.family = static_cast<SchedulerId>(family);
    }

    p.number("deployment", "n", cfg.n);
    if (cfg.n == 0 && p.errors.empty())
        p.errors.push_back(origin + ": missing required key 'n' in [deployment]");
    double area = 0.0;
    p.number("deployment", "area_side", area);
    if (area > 0.0) cfg.area_side = area;
    double margin = -1e300;
    p.number("deployment", "margin", margin);
    if (margin != -1e300) cfg.margin = margin;
    p.number("deployment", "m", cfg.m);
    int infra_mode = 0;
    p.choice("deployment", "infra_mode", {{"grid", 0}, {"uniform", 1}}, infra_mode);
    cfg.infra_mode = infra_mode == 0 ? InfraMode::Grid : InfraMode::Uniform;

    // [interference]
    double guard = -1.0;
    p.number("interference", "guard", guard);
    if (guard >= 0.0) {
        if (guard == 0.0) {
            if (auto e = p.get("interference", "guard"))
                p.err(e->line,
                      "guard = 0 is rejected: the protocol model requires a positive guard "
                      "zone around receivers");
        }
        cfg.cell_tdma.guard = cfg.multicast.guard = cfg.hybrid.guard = guard;
    }
    p.number("interference", "alpha", cfg.mobile.alpha);
    p.number("interference", "alpha", cfg.highway.alpha);
    p.number("interference", "beta", cfg.mobile.beta);
    p.number("interference", "noise", cfg.mobile.noise);
    p.number("interference", "noise", cfg.highway.noise);
    p.number("interference", "power", cfg.mobile.power);
    p.number("interference", "power", cfg.highway.power);
    p.number("interference", "processing_gain", cfg.mobile.processing_gain);
    p.number("interference", "absorption", cfg.highway.absorption);
    p.number("interference", "beta_floor", cfg.highway.beta_floor);

    // [scheduler] family options
    p.number("scheduler", "kappa_cell", cfg.cell_tdma.kappa_cell);
    p.number("scheduler", "kappa_cell", cfg.hybrid.kappa_cell);
    p.number("scheduler", "kappa_cell", cfg.multicast.kappa_cell);
    p.number("scheduler", "theta", cfg.mobile.theta);
    p.number("scheduler", "cell_side", cfg.highway.cell_side);
    p.number("scheduler", "kappa", cfg.highway.kappa);
    p.number("scheduler", "range_coeff", cfg.hybrid.range_coeff);
    int regime = 1;
    p.choice("scheduler", "regime", {{"fixed-range", 0}, {"shrunk-range", 1}}, regime);
    cfg.hybrid.regime = regime == 0 ? HybridRegime::FixedRange : HybridRegime::ShrunkRange;
    p.number("scheduler", "relay_cap", cfg.mobile.relay_queue_cap);

    // [flows]
    int kind = 0;
    p.choice("flows", "kind", {{"unicast", 0}, {"multicast", 1}}, kind);
    cfg.flow_kind = kind == 0 ? FlowKind::Unicast : FlowKind::Multicast;
    p.number("flows", "n_s", cfg.n_s);
    cfg.multicast.n_s = cfg.n_s;
    p.number("flows", "l", cfg.l);

    // [engine]
    uint64_t T = 0;
    p.number("engine", "T", T);
    if (T > 0) cfg.horizon = T;
    p.number("engine", "warmup_frac", cfg.warmup_frac);
    int inj = 0;
    p.choice("engine", "injection", {{"saturated", 0}, {"fixed-rate", 1}}, inj);
    cfg.injection.mode = inj == 0 ? Injection::Mode::Saturated : Injection::Mode::FixedRate;
    p.number("engine", "rate", cfg.injection.rate);
    p.number("engine", "window", cfg.injection.window);
    p.number("engine", "seed", cfg.seed);

    // [experiment]
    int param = -1;
    p.choice("experiment", "param", {{"n", 0}, {"l", 1}, {"M", 2}}, param);
    if (param >= 0) cfg.sweep_param = static_cast<SweepParam>(param);
    p.numbers("experiment", "values", cfg.sweep_values);
    p.number("experiment", "reps", cfg.repetitions);
    double ts = -1e300, tol = -1e300;
    p.number("experiment", "target_slope", ts);
    p.number("experiment", "tolerance", tol);
    if (ts != -1e300) cfg.target_slope = ts;
    if (tol != -1e300) cfg.tolerance = tol;

    // cross-field validation
    if (cfg.warmup_frac < 0.0 || cfg.warmup_frac >= 0.5)
        p.errors.push_back(origin + ": warmup_frac must lie in [0, 0.5)");
    if (cfg.injection.mode == Injection::Mode::FixedRate && !(cfg.injection.rate > 0.0))
        p.errors.push_back(origin + ": fixed-rate injection requires rate > 0");
    if (cfg.family == SchedulerId::MulticastCds && cfg.l < 2)
        p.errors.push_back(origin + ": multicast requires l >= 2");
    if (cfg.family == SchedulerId::Hybrid && cfg.m < 1)
        p.errors.push_back(origin + ": hybrid requires m >= 1 in [deployment]");

    if (!p.errors.empty()) throw ConfigError(p.errors);
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError({path + ": cannot open config file"});
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

Scenario scenario_from_config(const RunConfig& cfg) {
    Scenario sc;
    switch (cfg.family) {
        case SchedulerId::CellTdmaStraightline:
            sc = make_cell_tdma_scenario(cfg.n, cfg.seed, cfg.cell_tdma);
            break;
        case SchedulerId::Highway4Phase:
            sc = make_highway_scenario(cfg.n, cfg.seed, cfg.highway);
            break;
        case SchedulerId::TwoHopMobile:
            sc = make_mobile_scenario(cfg.n, cfg.seed, cfg.mobile);
            break;
        case SchedulerId::MulticastCds:
            sc = make_multicast_scenario(cfg.n, cfg.l, cfg.seed, cfg.multicast);
            break;
        case SchedulerId::Hybrid: {
            HybridOptions opt = cfg.hybrid;
            opt.infra_mode = cfg.infra_mode;
            sc = make_hybrid_scenario(cfg.n, cfg.m, cfg.seed, opt);
            break;
        }
        case SchedulerId::ManualGreedy:
            throw InvalidScenarioError("manual-greedy is not a config-selectable family");
    }
    sc.injection.mode = cfg.injection.mode;
    if (cfg.injection.rate > 0.0) sc.injection.rate = cfg.injection.rate;
    if (cfg.injection.window > 0) sc.injection.window = cfg.injection.window;
    sc.warmup_frac = cfg.warmup_frac;
    if (cfg.margin) sc.connectivity_range = critical_range(cfg.n, *cfg.margin);
    return sc;
}

SweepSpec sweep_spec_from_config(const RunConfig& cfg) {
    if (!cfg.sweep_param)
        throw ConfigError({"[experiment] param is required for sweep runs"});
    SweepSpec spec;
    spec.family = cfg.family;
    spec.param = *cfg.sweep_param;
    spec.values = cfg.sweep_values;
    spec.repetitions = cfg.repetitions;
    spec.base_seed = cfg.seed;
    spec.n_fixed = cfg.n;
    spec.l_fixed = cfg.l;
    spec.m_fixed = cfg.m;
    spec.cell_tdma = cfg.cell_tdma;
    spec.highway = cfg.highway;
    spec.mobile = cfg.mobile;
    spec.multicast = cfg.multicast;
    spec.hybrid = cfg.hybrid;
    if (cfg.horizon) spec.horizon_override = cfg.horizon;
    return spec;
}

uint64_t horizon_from_config(const RunConfig& cfg) {
    if (cfg.horizon) return *cfg.horizon;
    return default_horizon(cfg.family, cfg.n);
}

}  // namespace capnet
