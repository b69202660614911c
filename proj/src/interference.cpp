#include "capnet/interference.hpp"

#include <algorithm>
#include <cmath>

#include "capnet/errors.hpp"

namespace capnet {

bool protocol_compliant(const Link& link, const Point& rx_pos,
                        std::span<const Point> other_tx_positions, const ProtocolParams& p) {
    if (link.length > p.range) return false;
    const double keepout = (1.0 + p.guard) * p.range;
    const double keepout2 = keepout * keepout;
    for (const Point& other : other_tx_positions) {
        if (dist2(other, rx_pos) < keepout2) return false;
    }
    return true;
}

double attenuation(double d, double alpha, double gamma) {
    if (d <= 0.0) return 1.0;
    double v = std::exp(-gamma * d) / std::pow(d, alpha);
    return std::min(1.0, v);
}

namespace {

double gain(double d, const PhysicalParams& phys) {
    if (phys.gain == GainModel::Attenuation)
        return attenuation(d, phys.path_loss_exponent, phys.absorption);
    return std::pow(d, -phys.path_loss_exponent);
}

}  // namespace

double sinr(const Link& link, std::span<const Link> active, std::span<const Point> positions,
            const PhysicalParams& phys) {
    const Point& rx = positions[link.rx];
    double d = dist(positions[link.tx], rx);
    if (d <= 0.0 && phys.gain == GainModel::PowerLaw)
        throw SingularGeometryError("sinr: tx coincident with rx");
    double signal = phys.power * gain(d, phys);

    double interference = 0.0;
    for (const Link& other : active) {
        if (other.tx == link.tx) continue;  // "not including v_i itself"
        double di = dist(positions[other.tx], rx);
        if (di <= 0.0)
            throw SingularGeometryError("sinr: interferer coincident with rx");
        interference += phys.power * gain(di, phys);
    }
    if (phys.gain == GainModel::PowerLaw) interference /= phys.processing_gain;
    return signal / (phys.noise + interference);
}

double shannon_rate(const Link& link, std::span<const Link> active,
                    std::span<const Point> positions, const PhysicalParams& phys) {
    return std::log1p(sinr(link, active, positions, phys));
}

namespace {

// distinct transmitters, tx != rx, and no node both transmitting and
// receiving in the same slot
void check_well_formed(std::span<const Link> links) {
    std::vector<NodeId> txs;
    txs.reserve(links.size());
    for (const Link& l : links) {
        if (l.tx == l.rx) throw MalformedScheduleError("link with tx == rx");
        txs.push_back(l.tx);
    }
    std::sort(txs.begin(), txs.end());
    if (std::adjacent_find(txs.begin(), txs.end()) != txs.end())
        throw MalformedScheduleError("duplicate transmitter in link set");
}

bool half_duplex_ok(std::span<const Link> links) {
    std::vector<NodeId> txs;
    txs.reserve(links.size());
    for (const Link& l : links) txs.push_back(l.tx);
    std::sort(txs.begin(), txs.end());
    for (const Link& l : links) {
        if (l.broadcast) continue;  // broadcast reception is filtered per node
        if (std::binary_search(txs.begin(), txs.end(), l.rx)) return false;
    }
    return true;
}

}  // namespace

bool feasible_set(std::span<const Link> links, std::span<const Point> positions,
                  const InterferenceModel& model) {
    if (links.empty()) return true;
    check_well_formed(links);
    if (!half_duplex_ok(links)) return false;

    if (const auto* p = std::get_if<ProtocolParams>(&model)) {
        std::vector<Point> others;
        others.reserve(links.size() - 1);
        for (size_t i = 0; i < links.size(); ++i) {
            others.clear();
            for (size_t j = 0; j < links.size(); ++j)
                if (j != i) others.push_back(positions[links[j].tx]);
            Link l = links[i];
            l.length = dist(positions[l.tx], positions[l.rx]);
            if (!protocol_compliant(l, positions[l.rx], others, *p)) return false;
        }
        return true;
    }

    const auto& phys = std::get<PhysicalParams>(model);
    for (const Link& l : links) {
        if (sinr(l, links, positions, phys) < phys.sinr_threshold) return false;
    }
    return true;
}

}  // namespace capnet
