#pragma once

#include <span>
#include <variant>
#include <vector>

#include "capnet/geometry.hpp"

namespace capnet {

// Protocol model: reception succeeds iff the link is within
// range r and every other simultaneous transmitter is >= (1+guard)*r from
// the receiver.
struct ProtocolParams {
    double range = 0.1;  // r(n)
    double guard = 1.0;  // delta, must stay > 0
};

enum class GainModel : uint8_t {
    PowerLaw,     // gain = d^-alpha, interference scaled by 1/L
    Attenuation,  // gain = min{1, e^{-gamma d} / d^alpha}, no 1/L
};

struct PhysicalParams {
    double power = 1.0;            // P, identical across nodes
    double noise = 1e-9;           // N0
    double processing_gain = 1.0;  // L >= 1, PowerLaw mode only
    double sinr_threshold = 1.0;   // beta
    double path_loss_exponent = 4.0;  // alpha > 2
    double absorption = 0.0;          // gamma >= 0, Attenuation mode only
    GainModel gain = GainModel::PowerLaw;
};

struct Link {
    NodeId tx;
    NodeId rx;
    double length = 0.0;
    bool broadcast = false;
};

using InterferenceModel = std::variant<ProtocolParams, PhysicalParams>;

// Both protocol-model conditions for one link against the other transmitters.
bool protocol_compliant(const Link& link, const Point& rx_pos,
                        std::span<const Point> other_tx_positions, const ProtocolParams& p);

// l(d) = min{1, e^{-gamma d} / d^alpha}; clamps to 1 at small d.
double attenuation(double d, double alpha, double gamma);

// SINR of `link` under the full active set (link.tx excluded from the
// interferer sum). Throws SingularGeometryError if an interferer sits on
// the receiver.
double sinr(const Link& link, std::span<const Link> active, std::span<const Point> positions,
            const PhysicalParams& phys);

// log(1 + SINR), natural log (nats per channel use).
double shannon_rate(const Link& link, std::span<const Link> active,
                    std::span<const Point> positions, const PhysicalParams& phys);

// Joint feasibility of a slot's link set. Checks distinct transmitters and
// half-duplex in both models, then the per-model admission rule.
bool feasible_set(std::span<const Link> links, std::span<const Point> positions,
                  const InterferenceModel& model);

}  // namespace capnet
