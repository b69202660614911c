#include "capnet/capacity.hpp"

#include <algorithm>
#include <cmath>

#include "capnet/errors.hpp"

namespace capnet {

double identity_estimate(double Y, double k, double W) {
    if (k < 1.0) throw InvalidScenarioError("identity_estimate: k must be >= 1");
    if (Y < 0.0) throw InvalidScenarioError("identity_estimate: Y must be >= 0");
    if (!(W > 0.0)) throw InvalidScenarioError("identity_estimate: W must be > 0");
    return Y * W / k;
}

double identity_residual(const Metrics& metrics) {
    if (!(metrics.eta > 0.0)) throw MetricsUndefinedError("identity_residual: eta must be > 0");
    return std::abs(metrics.eta - metrics.Y * metrics.W / metrics.k) / metrics.eta;
}

double packing_upper_bound(double delta, double range, double area) {
    if (!(delta > 0.0))
        throw InvalidScenarioError("packing_upper_bound: the protocol model requires delta > 0");
    if (!(range > 0.0)) throw InvalidScenarioError("packing_upper_bound: range must be > 0");
    return 16.0 * area / (M_PI * delta * delta * range * range);
}

double corner_k_min(double range) {
    if (!(range > 0.0)) throw InvalidScenarioError("corner_k_min: range must be > 0");
    return std::sqrt(2.0) / (256.0 * range);
}

double lambda_upper_bound(uint32_t n, double range, double delta, double W) {
    if (n < 2) throw InvalidScenarioError("lambda_upper_bound: need n >= 2");
    if (!(range > 0.0) || !(delta > 0.0))
        throw InvalidScenarioError("lambda_upper_bound: range and delta must be > 0");
    return (2048.0 * std::sqrt(2.0) / (M_PI * delta * delta)) * W /
           (static_cast<double>(n) * range);
}

double hybrid_eta_estimate(uint32_t n, uint32_t m, double W, HybridRegime regime) {
    if (m < 1) throw InvalidScenarioError("hybrid_eta_estimate: need m >= 1");
    if (regime == HybridRegime::ShrunkRange) return static_cast<double>(m) * W;
    double n_over_log = static_cast<double>(n) / std::log(static_cast<double>(n));
    return (std::sqrt(n_over_log) + std::min(static_cast<double>(m), n_over_log)) * W;
}

BoundReport make_bound_report(uint32_t n, double range, double delta, double W, uint32_t m,
                              double area) {
    BoundReport r;
    r.n = n;
    r.range = range;
    r.delta = delta;
    r.W = W;
    r.m = m;
    r.area = area;
    r.packing_Y_max = packing_upper_bound(delta, range, area);
    r.corner_k_min = capnet::corner_k_min(range);
    r.lambda_upper_bound = capnet::lambda_upper_bound(n, range, delta, W);
    if (m >= 1) {
        r.hybrid_eta_fixed = hybrid_eta_estimate(n, m, W, HybridRegime::FixedRange);
        r.hybrid_eta_shrunk = hybrid_eta_estimate(n, m, W, HybridRegime::ShrunkRange);
    }
    return r;
}

}  // namespace capnet
