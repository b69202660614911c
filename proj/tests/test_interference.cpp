#include <cmath>

#include <doctest.h>

#include "capnet/errors.hpp"
#include "capnet/interference.hpp"
#include "capnet/rng.hpp"

using namespace capnet;

TEST_CASE("protocol_compliant guard and range conditions") {
    ProtocolParams p{0.1, 1.0};
    Link link{0, 1, 0.05, false};
    Point rx{0.0, 0.0};
    std::vector<Point> others{{0.25, 0.0}};
    CHECK(protocol_compliant(link, rx, others, p));  // 0.25 >= 0.2
    others[0] = {0.19, 0.0};
    CHECK_FALSE(protocol_compliant(link, rx, others, p));
    Link too_long{0, 1, 0.11, false};
    CHECK_FALSE(protocol_compliant(too_long, rx, {}, p));
}

TEST_CASE("attenuation formula, clamp and monotonicity") {
    CHECK(attenuation(2.0, 3.0, 0.0) == doctest::Approx(0.125));
    CHECK(attenuation(0.5, 3.0, 0.0) == doctest::Approx(1.0));  // clamped
    CHECK(attenuation(1.0, 4.0, 0.5) == doctest::Approx(std::exp(-0.5)));
    double prev = 1.5;
    for (double d = 0.0; d < 5.0; d += 0.17) {
        double v = attenuation(d, 3.0, 0.1);
        CHECK(v <= 1.0);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("sinr matches hand computations") {
    PhysicalParams phys;
    phys.power = 1.0;
    phys.noise = 0.1;
    phys.path_loss_exponent = 3.0;
    phys.processing_gain = 1.0;
    phys.gain = GainModel::PowerLaw;

    std::vector<Point> pos{{0, 0}, {1, 0}, {3, 0}};
    std::vector<Link> active{{0, 1, 1.0, false}};
    CHECK(sinr(active[0], active, pos, phys) == doctest::Approx(10.0));

    // interferer at distance 2 from the receiver
    active.push_back({2, 1, 0.0, false});
    CHECK(sinr(active[0], active, pos, phys) == doctest::Approx(1.0 / (0.1 + 0.125)));

    phys.processing_gain = 10.0;
    CHECK(sinr(active[0], active, pos, phys) == doctest::Approx(1.0 / (0.1 + 0.0125)));
}

TEST_CASE("sinr rejects an interferer on top of the receiver") {
    PhysicalParams phys;
    std::vector<Point> pos{{0, 0}, {1, 0}, {1, 0}};
    std::vector<Link> active{{0, 1, 1.0, false}, {2, 0, 1.0, false}};
    CHECK_THROWS_AS(sinr(active[0], active, pos, phys), SingularGeometryError);
}

TEST_CASE("sinr decreases as an interferer approaches the receiver") {
    PhysicalParams phys;
    phys.noise = 1e-3;
    std::vector<Point> pos{{0, 0}, {1, 0}, {5, 0}};
    std::vector<Link> active{{0, 1, 1.0, false}, {2, 1, 0.0, false}};
    double prev = 1e30;
    for (double x = 5.0; x > 1.2; x -= 0.25) {
        pos[2].x = x;
        double v = sinr(active[0], active, pos, phys);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("shannon_rate log identities") {
    PhysicalParams phys;
    phys.power = 1.0;
    phys.noise = 1.0;
    phys.path_loss_exponent = 3.0;
    phys.gain = GainModel::Attenuation;
    std::vector<Point> pos{{0, 0}, {2, 0}};
    std::vector<Link> active{{0, 1, 2.0, false}};
    // isolated link: SINR = l(2)/N0 = 0.125, rate = log(1.125)
    CHECK(shannon_rate(active[0], active, pos, phys) == doctest::Approx(std::log(1.125)));
    // rate 1 at SINR = e - 1
    phys.noise = 0.125 / (std::exp(1.0) - 1.0);
    CHECK(shannon_rate(active[0], active, pos, phys) == doctest::Approx(1.0));
}

TEST_CASE("feasible_set protocol examples") {
    ProtocolParams p{0.1, 1.0};
    InterferenceModel model = p;

    std::vector<Point> pos;
    std::vector<Link> links;
    CHECK(feasible_set(links, pos, model));  // empty set

    // two links, transmitters 3r apart, receivers within r of own tx
    pos = {{0.0, 0.0}, {0.05, 0.0}, {0.3, 0.0}, {0.35, 0.0}};
    links = {{0, 1, 0.05, false}, {2, 3, 0.05, false}};
    CHECK(feasible_set(links, pos, model));

    // duplicate transmitter is malformed, not merely infeasible
    std::vector<Link> dup = {{0, 1, 0.05, false}, {0, 3, 0.05, false}};
    CHECK_THROWS_AS(feasible_set(dup, pos, model), MalformedScheduleError);

    // half-duplex: receiver of one link transmits another
    std::vector<Link> hd = {{0, 1, 0.05, false}, {1, 2, 0.0, false}};
    CHECK_FALSE(feasible_set(hd, pos, model));
}

TEST_CASE("feasible_set physical co-located parallel links fail beta=2") {
    PhysicalParams phys;
    phys.sinr_threshold = 2.0;
    phys.noise = 1e-6;
    phys.gain = GainModel::PowerLaw;
    InterferenceModel model = phys;
    // two nearly co-located parallel links; each interferer sits at the same
    // distance as the signal, so SINR < 1 < beta always
    std::vector<Point> pos{{0, 0}, {1, 0}, {0, 0.001}, {1, 0.001}};
    std::vector<Link> links{{0, 1, 1.0, false}, {2, 3, 1.0, false}};
    CHECK_FALSE(feasible_set(links, pos, model));
}

TEST_CASE("feasibility is monotone under link removal") {
    Rng rng(2024);
    ProtocolParams p{0.15, 0.8};
    InterferenceModel proto = p;
    PhysicalParams phys;
    phys.sinr_threshold = 0.8;
    phys.noise = 1e-4;
    InterferenceModel physical = phys;

    for (int inst = 0; inst < 50; ++inst) {
        std::vector<Point> pos;
        std::vector<Link> links;
        uint32_t m = 3 + uint32_t(rng.below(5));
        for (uint32_t i = 0; i < m; ++i) {
            Point tx{rng.uniform01(), rng.uniform01()};
            Point rx{tx.x + rng.uniform(-0.1, 0.1), tx.y + rng.uniform(-0.1, 0.1)};
            pos.push_back(tx);
            pos.push_back(rx);
            links.push_back({2 * i, 2 * i + 1, dist(tx, rx), false});
        }
        for (const InterferenceModel& model : {proto, physical}) {
            if (!feasible_set(links, pos, model)) continue;
            for (uint32_t drop = 0; drop < m; ++drop) {
                std::vector<Link> sub;
                for (uint32_t i = 0; i < m; ++i)
                    if (i != drop) sub.push_back(links[i]);
                CHECK(feasible_set(sub, pos, model));
            }
        }
    }
}

TEST_CASE("protocol feasibility is invariant under rigid motion") {
    Rng rng(11);
    ProtocolParams p{0.2, 1.0};
    InterferenceModel model = p;
    for (int inst = 0; inst < 30; ++inst) {
        std::vector<Point> pos;
        std::vector<Link> links;
        for (uint32_t i = 0; i < 4; ++i) {
            Point tx{rng.uniform01(), rng.uniform01()};
            Point rx{tx.x + rng.uniform(-0.15, 0.15), tx.y + rng.uniform(-0.15, 0.15)};
            pos.push_back(tx);
            pos.push_back(rx);
            links.push_back({2 * i, 2 * i + 1, dist(tx, rx), false});
        }
        bool before = feasible_set(links, pos, model);
        double theta = rng.uniform(0.0, 2 * M_PI), dx = rng.uniform(-3, 3), dy = rng.uniform(-3, 3);
        std::vector<Point> moved;
        for (const Point& q : pos)
            moved.push_back({q.x * std::cos(theta) - q.y * std::sin(theta) + dx,
                             q.x * std::sin(theta) + q.y * std::cos(theta) + dy});
        CHECK(feasible_set(links, moved, model) == before);
    }
}
