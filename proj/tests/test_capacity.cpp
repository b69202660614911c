#include <cmath>

#include <doctest.h>

#include "capnet/capacity.hpp"
#include "capnet/errors.hpp"
#include "capnet/rng.hpp"

using namespace capnet;

TEST_CASE("identity_estimate basic values and validation") {
    CHECK(identity_estimate(1.0, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(identity_estimate(1.0, 2.0, 1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(identity_estimate(1.0, 0.5, 1.0), InvalidScenarioError);
    CHECK_THROWS_AS(identity_estimate(-1.0, 1.0, 1.0), InvalidScenarioError);
    CHECK_THROWS_AS(identity_estimate(1.0, 1.0, 0.0), InvalidScenarioError);
}

TEST_CASE("identity_estimate homogeneity degrees") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        double Y = rng.uniform(0.0, 50.0);
        double k = rng.uniform(1.0, 30.0);
        double W = rng.uniform(0.1, 9.0);
        double c = rng.uniform(0.5, 4.0);
        double base = identity_estimate(Y, k, W);
        CHECK(identity_estimate(c * Y, k, W) == doctest::Approx(c * base));
        CHECK(identity_estimate(Y, k, c * W) == doctest::Approx(c * base));
        CHECK(identity_estimate(Y, c * k, W) == doctest::Approx(base / c));
    }
}

TEST_CASE("identity_residual") {
    Metrics m;
    m.eta = 0.5;
    m.Y = 1.0;
    m.k = 2.0;
    m.W = 1.0;
    CHECK(identity_residual(m) == doctest::Approx(0.0));
    m.eta = 0.0;
    CHECK_THROWS_AS(identity_residual(m), MetricsUndefinedError);
}

TEST_CASE("packing_upper_bound pinned value and monotonicity") {
    CHECK(packing_upper_bound(1.0, 0.1, 1.0) == doctest::Approx(509.2958).epsilon(1e-5));
    CHECK(packing_upper_bound(2.0, 0.1, 1.0) ==
          doctest::Approx(packing_upper_bound(1.0, 0.1, 1.0) / 4.0));
    double prev = 1e18;
    for (double delta = 0.2; delta < 3.0; delta += 0.2) {
        double v = packing_upper_bound(delta, 0.1, 1.0);
        CHECK(v < prev);
        prev = v;
    }
    prev = 1e18;
    for (double r = 0.01; r < 0.5; r += 0.02) {
        double v = packing_upper_bound(1.0, r, 1.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(packing_upper_bound(0.0, 0.1, 1.0), InvalidScenarioError);
}

TEST_CASE("corner_k_min values") {
    CHECK(corner_k_min(0.1) == doctest::Approx(0.05524).epsilon(1e-3));
    CHECK(corner_k_min(0.01) == doctest::Approx(0.5524).epsilon(1e-3));
}

TEST_CASE("lambda_upper_bound pinned value and scaling") {
    CHECK(lambda_upper_bound(1000, 0.0663, 1.0, 1.0) == doctest::Approx(13.90).epsilon(2e-3));
    double v1 = lambda_upper_bound(1000, 0.05, 1.0, 1.0);
    double v2 = lambda_upper_bound(2000, 0.05, 1.0, 1.0);
    CHECK(v2 == doctest::Approx(v1 / 2.0));
}

TEST_CASE("hybrid_eta_estimate order values") {
    CHECK(hybrid_eta_estimate(2000, 1, 1.0, HybridRegime::FixedRange) ==
          doctest::Approx(std::sqrt(2000.0 / std::log(2000.0)) + 1.0).epsilon(1e-9));
    CHECK(hybrid_eta_estimate(2000, 64, 1.0, HybridRegime::ShrunkRange) == doctest::Approx(64.0));
    // fixed-range saturates at n/ln n infrastructure nodes
    double cap = 2000.0 / std::log(2000.0);
    CHECK(hybrid_eta_estimate(2000, 100000, 1.0, HybridRegime::FixedRange) ==
          doctest::Approx(std::sqrt(cap) + cap));
}

TEST_CASE("bound report echoes inputs") {
    BoundReport r = make_bound_report(1000, 0.1, 1.0, 2.0, 16, 1.0);
    CHECK(r.n == 1000);
    CHECK(r.W == 2.0);
    CHECK(r.packing_Y_max == doctest::Approx(509.2958).epsilon(1e-5));
    CHECK(r.hybrid_eta_shrunk == doctest::Approx(32.0));  // M * W
}
