#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "capnet/engine.hpp"
#include "capnet/scenario.hpp"

#include <json.hpp>

namespace capnet {

enum class SweepParam : uint8_t { N, L, M };

struct SweepSpec {
    SchedulerId family = SchedulerId::CellTdmaStraightline;
    SweepParam param = SweepParam::N;
    std::vector<uint32_t> values;
    uint32_t repetitions = 5;
    uint64_t base_seed = 1;

    // fixed parameters used when they are not the swept one
    uint32_t n_fixed = 1000;
    uint32_t l_fixed = 8;
    uint32_t m_fixed = 32;

    std::optional<uint64_t> horizon_override;

    CellTdmaOptions cell_tdma;
    HighwayOptions highway;
    MobileOptions mobile;
    MulticastOptions multicast;
    HybridOptions hybrid;
};

struct SweepRow {
    std::string family;
    std::string param_name;
    double param_value = 0.0;
    uint64_t seed = 0;
    uint32_t n = 0;
    uint32_t m = 0;
    uint32_t l = 0;
    uint64_t T = 0;
    double W = 1.0;
    double Y = 0.0;
    double k = 0.0;
    double eta = 0.0;
    double lambda_mean = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double residual = 0.0;
    bool stable = false;
    uint32_t max_Yt = 0;
    double packing_bound = 0.0;  // 0 when not a protocol-model run
    std::string error;           // nonempty row excluded from fits
};

// One row per (value, repetition); per-run seeds derived by counter from the
// base seed, so the table is identical regardless of thread scheduling.
std::vector<SweepRow> sweep(const SweepSpec& spec, uint32_t jobs);

std::string sweep_table_to_csv(const std::vector<SweepRow>& rows);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r2 = 0.0;
    size_t points = 0;
    std::vector<double> x_means;  // per swept value (pre-log)
    std::vector<double> y_means;
};

// OLS on (log x, log y) of per-value means. Rows with errors, instability or
// nonpositive values are excluded; fewer than 3 surviving points throws
// FitUndefinedError.
FitResult loglog_slope(const std::vector<SweepRow>& table,
                       const std::function<double(const SweepRow&)>& x_of,
                       const std::function<double(const SweepRow&)>& y_of);

enum class ScalingFamily : uint8_t { CellTdma, Mobile, Multicast, Hybrid };

struct ScalingReport {
    ScalingFamily family;
    FitResult fit;
    double target_slope = 0.0;
    double tolerance = 0.0;
    double min_r2 = 0.0;  // 0 = not required
    bool pass = false;
    std::string notes;
};

// Family defaults implementing the published exponents:
//   cell-tdma: lambda vs sqrt(n ln n), target -1 +- 0.15, R^2 >= 0.95
//   mobile:    lambda vs n,            target  0 +- 0.15
//   multicast: eta vs l,               target -0.5 +- 0.15
//   hybrid:    eta vs M,               target +1 +- 0.2
SweepSpec default_sweep_spec(ScalingFamily family, uint64_t base_seed);

// Pure function of the table; never re-runs simulations.
ScalingReport scaling_check(ScalingFamily family, const std::vector<SweepRow>& table);

nlohmann::json scaling_report_to_json(const ScalingReport& r);

const char* scaling_family_name(ScalingFamily f);

}  // namespace capnet
