#include "capnet/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "capnet/errors.hpp"
#include "capnet/rng.hpp"

namespace capnet {

TdmaSchedule build_cell_tdma(double area_side, double cell_side, uint32_t d) {
    if (!(cell_side > 0.0)) throw InvalidScenarioError("build_cell_tdma: cell_side must be > 0");
    if (d < 1) throw InvalidScenarioError("build_cell_tdma: reuse parameter d must be >= 1");
    TdmaSchedule s;
    s.cell_side = cell_side;
    s.reuse_parameter = d;
    s.reuse_factor = 2 * (d + 1);
    s.cycle_length = s.reuse_factor * s.reuse_factor;
    if (area_side + 1e-12 < s.reuse_factor * cell_side)
        throw InvalidScenarioError("build_cell_tdma: area too small for one full reuse block");
    uint32_t n_side =
        std::max<uint32_t>(1, static_cast<uint32_t>(std::round(area_side / cell_side)));
    s.nx = s.ny = n_side;
    return s;
}

uint32_t min_reuse_parameter(double cell_side, double hop_len, double guard,
                             bool rx_anywhere_in_range) {
    for (uint32_t d = 1; d < 64; ++d) {
        double l = 2.0 * (d + 1);
        double sep =
            rx_anywhere_in_range ? (l - 1.0) * cell_side - hop_len : (l - 2.0) * cell_side;
        if (sep >= (1.0 + guard) * hop_len) return d;
    }
    throw InvalidScenarioError("min_reuse_parameter: no d < 64 satisfies the guard");
}

LinkSet tdma_slot_links(const TdmaSchedule& schedule, uint64_t slot, const CellGraph& cells,
                        const CellCandidateFn& pick) {
    LinkSet out;
    out.slot_index = slot;
    const uint32_t phase = static_cast<uint32_t>(slot % schedule.cycle_length);
    const uint32_t l = schedule.reuse_factor;
    // same-phase cells form a sub-lattice with stride l
    const uint32_t i0 = phase / l, j0 = phase % l;
    for (uint32_t j = j0; j < cells.ny; j += l) {
        for (uint32_t i = i0; i < cells.nx; i += l) {
            auto cand = pick(cells.index(i, j));
            if (!cand) continue;
            out.active.push_back(cand->link);
            out.carrying.push_back(cand->link);
        }
    }
    return out;
}

namespace {

bool feasible_with(std::vector<Link>& set, const Link& cand, std::span<const Point> positions,
                   const InterferenceModel& model) {
    set.push_back(cand);
    bool ok = false;
    try {
        ok = feasible_set(set, positions, model);
    } catch (const MalformedScheduleError&) {
        ok = false;  // duplicate transmitter among candidates
    }
    set.pop_back();
    return ok;
}

}  // namespace

LinkSet greedy_feasible_set(std::span<const Link> candidates, std::span<const int> queue_lens,
                            std::span<const Point> positions, const InterferenceModel& model,
                            Tiebreak tiebreak, uint64_t seed) {
    std::vector<size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), size_t{0});
    if (tiebreak == Tiebreak::LongestQueue) {
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            int qa = a < queue_lens.size() ? queue_lens[a] : 0;
            int qb = b < queue_lens.size() ? queue_lens[b] : 0;
            return qa > qb;
        });
    } else {
        Rng rng = Rng::derived(seed, 0x6772);
        rng.shuffle(order);
    }

    LinkSet out;
    for (size_t idx : order) {
        Link l = candidates[idx];
        l.length = dist(positions[l.tx], positions[l.rx]);
        if (feasible_with(out.active, l, positions, model)) {
            out.active.push_back(l);
            out.carrying.push_back(l);
        }
    }
    return out;
}

LinkSet max_feasible_set_bruteforce(std::span<const Link> candidates,
                                    std::span<const Point> positions,
                                    const InterferenceModel& model) {
    if (candidates.size() > 20)
        throw OracleSizeError("max_feasible_set_bruteforce: > 20 candidates");
    const uint32_t m = static_cast<uint32_t>(candidates.size());
    uint32_t best_mask = 0;
    int best_count = 0;
    std::vector<Link> subset;
    for (uint32_t mask = 1; mask < (1u << m); ++mask) {
        int count = __builtin_popcount(mask);
        if (count <= best_count) continue;
        subset.clear();
        for (uint32_t i = 0; i < m; ++i) {
            if (mask & (1u << i)) {
                Link l = candidates[i];
                l.length = dist(positions[l.tx], positions[l.rx]);
                subset.push_back(l);
            }
        }
        bool ok = false;
        try {
            ok = feasible_set(subset, positions, model);
        } catch (const MalformedScheduleError&) {
            ok = false;
        }
        if (ok) {
            best_count = count;
            best_mask = mask;
        }
    }
    LinkSet out;
    for (uint32_t i = 0; i < m; ++i) {
        if (best_mask & (1u << i)) {
            Link l = candidates[i];
            l.length = dist(positions[l.tx], positions[l.rx]);
            out.active.push_back(l);
            out.carrying.push_back(l);
        }
    }
    return out;
}

namespace {

// squared-distance gain for the power-law model; avoids sqrt and pow on the
// hot path (alpha = 4 is a reciprocal square of d^2)
inline double powerlaw_gain_d2(double d2, double alpha) {
    if (alpha == 4.0) return 1.0 / (d2 * d2);
    if (alpha == 2.0) return 1.0 / d2;
    return std::pow(d2, -0.5 * alpha);
}

// flat bucket grid over the receiver subset for nearest-receiver queries
class ReceiverGrid {
   public:
    ReceiverGrid(std::span<const Point> positions, const std::vector<uint32_t>& receivers,
                 double extent)
        : positions_(positions), extent_(extent) {
        side_ = std::max<uint32_t>(
            1, static_cast<uint32_t>(std::sqrt(static_cast<double>(receivers.size()) / 2.0)));
        cell_ = extent / side_;
        buckets_.assign(static_cast<size_t>(side_) * side_, {});
        for (uint32_t r : receivers) buckets_[bucket_of(positions[r])].push_back(r);
    }

    NodeId nearest(const Point& p) const {
        int32_t i0 = clamp(static_cast<int32_t>(p.x / cell_));
        int32_t j0 = clamp(static_cast<int32_t>(p.y / cell_));
        double best = std::numeric_limits<double>::infinity();
        NodeId bid = UINT32_MAX;
        for (int32_t ring = 0; ring <= static_cast<int32_t>(side_); ++ring) {
            if (bid != UINT32_MAX && ring > 1 &&
                best <= (ring - 1) * cell_ * ((ring - 1) * cell_))
                break;
            for (int32_t j = j0 - ring; j <= j0 + ring; ++j) {
                if (j < 0 || j >= static_cast<int32_t>(side_)) continue;
                for (int32_t i = i0 - ring; i <= i0 + ring; ++i) {
                    if (i < 0 || i >= static_cast<int32_t>(side_)) continue;
                    if (std::max(std::abs(i - i0), std::abs(j - j0)) != ring) continue;
                    for (NodeId r : buckets_[static_cast<size_t>(j) * side_ + i]) {
                        double d = dist2(positions_[r], p);
                        if (d < best || (d == best && r < bid)) {
                            best = d;
                            bid = r;
                        }
                    }
                }
            }
        }
        return bid;
    }

   private:
    int32_t clamp(int32_t v) const {
        return std::min(std::max(v, 0), static_cast<int32_t>(side_) - 1);
    }
    size_t bucket_of(const Point& p) const {
        return static_cast<size_t>(clamp(static_cast<int32_t>(p.y / cell_))) * side_ +
               clamp(static_cast<int32_t>(p.x / cell_));
    }

    std::span<const Point> positions_;
    double extent_;
    uint32_t side_ = 1;
    double cell_ = 1.0;
    std::vector<std::vector<NodeId>> buckets_;
};

}  // namespace

TwoHopSelection two_hop_select(std::span<const Point> positions, uint32_t n_ordinary,
                               const TwoHopParams& params, uint64_t seed, uint64_t slot) {
    const uint32_t n = n_ordinary;
    if (n < 2) throw InvalidScenarioError("two_hop_select: need n >= 2");
    TwoHopSelection sel;
    const uint32_t n_s = static_cast<uint32_t>(params.sender_density * n);
    if (n_s == 0) return sel;

    Rng rng = Rng::derived(mix_seed(seed, 0x2707), slot);
    auto senders = rng.sample_without_replacement(n, n_s);
    std::vector<bool> is_sender(n, false);
    for (uint32_t s : senders) is_sender[s] = true;
    std::vector<uint32_t> receivers;
    receivers.reserve(n - n_s);
    double extent = 0.0;
    for (uint32_t r = 0; r < n; ++r) {
        extent = std::max({extent, positions[r].x, positions[r].y});
        if (!is_sender[r]) receivers.push_back(r);
    }

    ReceiverGrid grid(positions, receivers, std::max(extent, 1e-9));
    sel.proposed.reserve(n_s);
    for (uint32_t s : senders) {
        NodeId rx = grid.nearest(positions[s]);
        sel.proposed.push_back({s, rx, dist(positions[s], positions[rx]), false});
    }

    // retention under the full proposed transmitter set; fast path for the
    // power-law gain works in squared distances throughout
    sel.retained.reserve(sel.proposed.size());
    if (params.phys.gain == GainModel::PowerLaw) {
        const double alpha = params.phys.path_loss_exponent;
        for (const Link& l : sel.proposed) {
            const Point& rx = positions[l.rx];
            double own = powerlaw_gain_d2(std::max(dist2(positions[l.tx], rx), 1e-300), alpha);
            double interference = 0.0;
            for (const Link& o : sel.proposed) {
                if (o.tx == l.tx) continue;
                double d2i = dist2(positions[o.tx], rx);
                if (d2i <= 0.0)
                    throw SingularGeometryError("two_hop_select: interferer on receiver");
                interference += powerlaw_gain_d2(d2i, alpha);
            }
            interference *= params.phys.power / params.phys.processing_gain;
            double s = params.phys.power * own / (params.phys.noise + interference);
            if (s >= params.phys.sinr_threshold) sel.retained.push_back(l);
        }
    } else {
        for (const Link& l : sel.proposed) {
            if (sinr(l, sel.proposed, positions, params.phys) >= params.phys.sinr_threshold)
                sel.retained.push_back(l);
        }
    }
    return sel;
}

}  // namespace capnet
