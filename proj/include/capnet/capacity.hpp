#pragma once

#include <cstdint>
#include <string>

#include "capnet/engine.hpp"

namespace capnet {

// eta = Y * W / k  (the capacity identity; exact for stable runs)
double identity_estimate(double Y, double k, double W);

// |eta - Y*W/k| / eta
double identity_residual(const Metrics& metrics);

// Y <= 16 * area / (pi * delta^2 * r^2): each transmitter consumes at least a
// quarter disk of radius delta*r/2.
double packing_upper_bound(double delta, double range, double area);

// k >= sqrt(2) / (256 * r) on the unit square (corner-pair argument).
double corner_k_min(double range);

// lambda <= (2048*sqrt(2) / (pi*delta^2)) * W / (n*r)
double lambda_upper_bound(uint32_t n, double range, double delta, double W);

enum class HybridRegime : uint8_t { FixedRange, ShrunkRange };

// Order-level estimate with unit constants:
//   fixed-range : (sqrt(n/ln n) + min(M, n/ln n)) * W
//   shrunk-range: M * W
double hybrid_eta_estimate(uint32_t n, uint32_t m, double W, HybridRegime regime);

// Inputs echoed alongside each bound, for the bounds report JSON.
struct BoundReport {
    uint32_t n = 0;
    double range = 0.0;
    double delta = 0.0;
    double W = 1.0;
    uint32_t m = 0;       // infrastructure count, 0 = none
    double area = 1.0;

    double packing_Y_max = 0.0;
    double corner_k_min = 0.0;
    double lambda_upper_bound = 0.0;
    double hybrid_eta_fixed = 0.0;   // order estimate, unit constants
    double hybrid_eta_shrunk = 0.0;  // order estimate, unit constants
};

BoundReport make_bound_report(uint32_t n, double range, double delta, double W, uint32_t m,
                              double area);

}  // namespace capnet
