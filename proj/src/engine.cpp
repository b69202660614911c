#include "capnet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "capnet/errors.hpp"
#include "capnet/rng.hpp"

namespace capnet {

const char* scheduler_name(SchedulerId id) {
    switch (id) {
        case SchedulerId::CellTdmaStraightline: return "cell-tdma-straightline";
        case SchedulerId::Highway4Phase: return "highway-4phase";
        case SchedulerId::TwoHopMobile: return "two-hop-mobile";
        case SchedulerId::MulticastCds: return "multicast-cds";
        case SchedulerId::Hybrid: return "hybrid";
        case SchedulerId::ManualGreedy: return "manual-greedy";
    }
    return "?";
}

namespace {

// ---------------------------------------------------------------------------
// shared bookkeeping
// ---------------------------------------------------------------------------

struct TraceBuilder {
    RunTrace t;

    void begin(uint64_t T, double warmup_frac, uint32_t n_ord, uint32_t n_flows, uint64_t seed) {
        t.horizon = T;
        t.warmup = static_cast<uint64_t>(warmup_frac * static_cast<double>(T));
        t.n_ordinary = n_ord;
        t.seed = seed;
        t.per_slot_active.reserve(T);
        t.in_transit.reserve(T);
        t.delivered_per_flow.assign(n_flows, 0);
        t.delivered_per_flow_window.assign(n_flows, 0);
    }

    bool in_window(uint64_t slot) const { return slot >= t.warmup; }

    void slot_done(uint64_t slot, uint32_t y, uint64_t q) {
        t.per_slot_active.push_back(y);
        t.in_transit.push_back(q);
        t.sum_Yt += y;
        if (in_window(slot)) t.sum_Yt_window += y;
        t.max_Yt = std::max(t.max_Yt, y);
    }

    void delivered(uint64_t slot, uint32_t flow, uint32_t h) {
        t.delivered_per_flow[flow]++;
        t.delivered_total++;
        t.hops_delivered_total += h;
        t.hop_histogram[h]++;
        if (in_window(slot)) {
            t.delivered_per_flow_window[flow]++;
            t.delivered_window++;
            t.hops_delivered_window += h;
        }
    }
};

// per-flow injection gate
struct InjectState {
    Injection cfg;
    std::vector<uint32_t> inflight;  // packets in the network per flow
    std::vector<double> credit;      // fixed-rate accumulator
    std::vector<uint64_t> backlog;   // fixed-rate injected-not-admitted
    std::vector<double> tokens;      // fair-share cap accumulator

    void init(uint32_t n_flows, const Injection& c) {
        cfg = c;
        inflight.assign(n_flows, 0);
        credit.assign(n_flows, 0.0);
        backlog.assign(n_flows, 0);
        tokens.assign(cfg.rate_cap > 0.0 ? n_flows : 0, 1.0);
    }

    void tick() {
        for (size_t f = 0; f < tokens.size(); ++f)
            tokens[f] = std::min(tokens[f] + cfg.rate_cap, 4.0);  // small burst allowance
        if (cfg.mode != Injection::Mode::FixedRate) return;
        for (size_t f = 0; f < credit.size(); ++f) {
            credit[f] += cfg.rate;
            while (credit[f] >= 1.0) {
                credit[f] -= 1.0;
                backlog[f]++;
            }
        }
    }

    bool can_inject(uint32_t flow) const {
        if (!tokens.empty() && tokens[flow] < 1.0) return false;
        if (cfg.mode == Injection::Mode::Saturated) return inflight[flow] < cfg.window;
        return backlog[flow] > 0;
    }

    void on_inject(uint32_t flow) {
        inflight[flow]++;
        if (!tokens.empty()) tokens[flow] -= 1.0;
        if (cfg.mode == Injection::Mode::FixedRate) backlog[flow]--;
    }

    void on_deliver(uint32_t flow) { inflight[flow]--; }

    uint64_t source_backlog_total() const {
        uint64_t s = 0;
        for (uint64_t b : backlog) s += b;
        return s;
    }
};

void verify_links(const Scenario& sc, const std::vector<Link>& links,
                  std::span<const Point> positions, double beta_override = -1.0) {
    if (!sc.verify_every_slot || links.empty()) return;
    InterferenceModel model = sc.interference;
    if (beta_override > 0.0) {
        if (auto* phys = std::get_if<PhysicalParams>(&model)) phys->sinr_threshold = beta_override;
    }
    if (!feasible_set(links, positions, model))
        throw MalformedScheduleError("engine emitted an infeasible link set");
}

// ---------------------------------------------------------------------------
// cell-TDMA packet mover: straight-line paths, multicast trees, hybrid
// ---------------------------------------------------------------------------

struct PathTask {
    uint32_t flow;
    uint32_t step;  // hop index into route.hops
};

struct TreeTask {
    uint32_t flow;
    uint32_t packet;  // per-flow sequence number
    uint32_t node;    // tree cell index
};

struct TreePacket {
    uint32_t seq;
    uint32_t remaining;  // tree cells not yet transmitted
};

class CellTdmaDriver {
   public:
    CellTdmaDriver(const Scenario& sc, TraceBuilder& tb) : sc_(sc), tb_(tb) {
        positions_ = sc.deployment.positions();
        const uint32_t cells = sc.cells.cell_count();
        relay_q_.assign(cells, {});
        tree_q_.assign(cells, {});
        inject_rr_.assign(cells, 0);
        flows_in_cell_.assign(cells, {});
        inject_.init(static_cast<uint32_t>(sc.flows.flows.size()), sc.injection);

        for (const Flow& f : sc.flows.flows) {
            CellIndex c = sc.cells.cell_of(positions_[f.source]);
            flows_in_cell_[c].push_back(f.flow_id);
        }
        tree_children_.resize(sc.routes.size());
        tree_next_seq_.assign(sc.routes.size(), 0);
        tree_live_.resize(sc.routes.size());
        for (size_t f = 0; f < sc.routes.size(); ++f) {
            const Route& r = sc.routes[f];
            if (r.kind != RouteKind::Tree) continue;
            tree_children_[f].assign(r.tree_cells.size(), {});
            for (size_t i = 1; i < r.tree_cells.size(); ++i)
                tree_children_[f][r.tree_parent[i]].push_back(static_cast<uint32_t>(i));
        }
    }

    void run(uint64_t T) {
        for (uint64_t slot = 0; slot < T; ++slot) {
            inject_.tick();
            LinkSet ls = tdma_slot_links(sc_.tdma, slot % sc_.tdma.cycle_length, sc_.cells,
                                         [&](CellIndex c) { return pick(c, slot); });
            verify_links(sc_, ls.carrying, positions_);
            for (const PendingMove& m : moves_) apply_move(m, slot);
            moves_.clear();
            tb_.slot_done(slot, static_cast<uint32_t>(ls.carrying.size()), q_total());
        }
        tb_.t.inflight_transmissions_end = inflight_transmissions();
    }

   private:
    struct PendingMove {
        bool is_tree = false;
        PathTask path{};
        TreeTask tree{};
    };

    // Candidate for a firing cell: relay-priority, then source injection in
    // round-robin over the cell's resident flows.
    std::optional<TransmitCandidate> pick(CellIndex c, uint64_t) {
        if (!relay_q_[c].empty()) {
            PathTask task = relay_q_[c].front();
            relay_q_[c].pop_front();
            moves_.push_back({false, task, {}});
            return candidate_for(task);
        }
        if (!tree_q_[c].empty()) {
            TreeTask task = tree_q_[c].front();
            tree_q_[c].pop_front();
            moves_.push_back({true, {}, task});
            return candidate_for(task);
        }
        // injection
        auto& flows = flows_in_cell_[c];
        if (flows.empty()) return std::nullopt;
        for (size_t probe = 0; probe < flows.size(); ++probe) {
            uint32_t fi = flows[(inject_rr_[c] + probe) % flows.size()];
            if (!inject_.can_inject(fi)) continue;
            inject_rr_[c] = (inject_rr_[c] + probe + 1) % flows.size();
            inject_.on_inject(fi);
            if (sc_.routes[fi].kind == RouteKind::Tree) {
                uint32_t seq = tree_next_seq_[fi]++;
                tree_live_[fi].push_back({seq, static_cast<uint32_t>(
                                                   sc_.routes[fi].tree_cells.size())});
                TreeTask task{fi, seq, 0};
                moves_.push_back({true, {}, task});
                return candidate_for(task);
            }
            PathTask task{fi, 0};
            moves_.push_back({false, task, {}});
            return candidate_for(task);
        }
        return std::nullopt;
    }

    TransmitCandidate candidate_for(const PathTask& t) const {
        const PathHop& h = sc_.routes[t.flow].hops[t.step];
        Link l{h.tx, h.rx, dist(positions_[h.tx], positions_[h.rx]), false};
        return {l, t.flow};
    }

    TransmitCandidate candidate_for(const TreeTask& t) const {
        const Route& r = sc_.routes[t.flow];
        NodeId tx = r.tree_tx[t.node];
        NodeId rx;
        const auto& kids = tree_children_[t.flow][t.node];
        if (!kids.empty()) {
            rx = r.tree_tx[kids.front()];
        } else if (t.node != 0) {
            rx = r.tree_tx[r.tree_parent[t.node]];  // leaf: representative listener
        } else {
            rx = sc_.flows.flows[t.flow].destinations.front();
        }
        Link l{tx, rx, dist(positions_[tx], positions_[rx]), true};
        return {l, t.flow};
    }

    void apply_move(const PendingMove& m, uint64_t slot) {
        if (!m.is_tree) {
            const Route& r = sc_.routes[m.path.flow];
            uint32_t next = m.path.step + 1;
            if (next >= r.hops.size()) {
                inject_.on_deliver(m.path.flow);
                tb_.delivered(slot, m.path.flow, static_cast<uint32_t>(r.hops.size()));
            } else {
                relay_q_[r.hops[next].tx_cell].push_back({m.path.flow, next});
            }
            return;
        }
        const Route& r = sc_.routes[m.tree.flow];
        auto& live = tree_live_[m.tree.flow];
        auto it = std::find_if(live.begin(), live.end(),
                               [&](const TreePacket& p) { return p.seq == m.tree.packet; });
        it->remaining--;
        for (uint32_t child : tree_children_[m.tree.flow][m.tree.node]) {
            tree_q_[r.tree_cells[child]].push_back({m.tree.flow, m.tree.packet, child});
        }
        if (it->remaining == 0) {
            inject_.on_deliver(m.tree.flow);
            tb_.delivered(slot, m.tree.flow, static_cast<uint32_t>(r.tree_cells.size()));
            live.erase(it);
        }
    }

    uint64_t q_total() const {
        uint64_t q = inject_.source_backlog_total();
        for (const auto& dq : relay_q_) q += dq.size();
        for (const auto& lv : tree_live_)
            q += lv.size();  // each in-flight flood counts once
        return q;
    }

    uint64_t inflight_transmissions() const {
        uint64_t s = 0;
        for (const auto& dq : relay_q_)
            for (const PathTask& t : dq) s += t.step;  // hops already done
        for (size_t f = 0; f < tree_live_.size(); ++f) {
            for (const TreePacket& p : tree_live_[f])
                s += sc_.routes[f].tree_cells.size() - p.remaining;
        }
        return s;
    }

    const Scenario& sc_;
    TraceBuilder& tb_;
    std::vector<Point> positions_;
    std::vector<std::deque<PathTask>> relay_q_;
    std::vector<std::deque<TreeTask>> tree_q_;
    std::vector<std::vector<uint32_t>> flows_in_cell_;
    std::vector<uint32_t> inject_rr_;
    std::vector<std::vector<std::vector<uint32_t>>> tree_children_;  // [flow][tree idx]
    std::vector<uint32_t> tree_next_seq_;
    std::vector<std::vector<TreePacket>> tree_live_;
    InjectState inject_;
    std::vector<PendingMove> moves_;
};

// ---------------------------------------------------------------------------
// four-phase highway driver
// ---------------------------------------------------------------------------

class HighwayDriver {
   public:
    HighwayDriver(const Scenario& sc, TraceBuilder& tb) : sc_(sc), tb_(tb) {
        positions_ = sc.deployment.positions();
        const uint32_t cells = sc.cells.cell_count();
        q_.assign(4 * cells, {});
        inject_rr_.assign(4 * cells, 0);
        flows_in_cell_.assign(4 * cells, {});
        inject_.init(static_cast<uint32_t>(sc.flows.flows.size()), sc.injection);
        // a flow injects in the phase of its first hop (usually access, but
        // the access hop collapses when the source is its entry cell's relay)
        for (const Flow& f : sc.flows.flows) {
            const PathHop& h0 = sc.routes[f.flow_id].hops.front();
            uint32_t p = phase_queue_of(h0.phase);
            flows_in_cell_[p * cells + h0.tx_cell].push_back(f.flow_id);
        }
    }

    void run(uint64_t T) {
        for (uint64_t slot = 0; slot < T; ++slot) {
            inject_.tick();
            const uint32_t phase = static_cast<uint32_t>(slot % 4);
            const uint64_t sub_slot = (slot / 4) % sc_.phase_tdma[phase].cycle_length;
            LinkSet ls =
                tdma_slot_links(sc_.phase_tdma[phase], sub_slot, sc_.cells,
                                [&](CellIndex c) { return pick(c, phase); });
            verify_links(sc_, ls.carrying, positions_, sc_.phase_beta[phase]);
            for (const PathTask& t : moves_) apply_move(t, slot);
            moves_.clear();
            tb_.slot_done(slot, static_cast<uint32_t>(ls.carrying.size()), q_total());
        }
        tb_.t.inflight_transmissions_end = inflight_transmissions();
    }

   private:
    std::optional<TransmitCandidate> pick(CellIndex c, uint32_t phase) {
        const size_t slot_key = phase * sc_.cells.cell_count() + c;
        auto& dq = q_[slot_key];
        if (!dq.empty()) {
            PathTask t = dq.front();
            dq.pop_front();
            moves_.push_back(t);
            return candidate_for(t);
        }
        auto& flows = flows_in_cell_[slot_key];
        for (size_t probe = 0; probe < flows.size(); ++probe) {
            uint32_t fi = flows[(inject_rr_[slot_key] + probe) % flows.size()];
            if (!inject_.can_inject(fi)) continue;
            inject_rr_[slot_key] = (inject_rr_[slot_key] + probe + 1) % flows.size();
            inject_.on_inject(fi);
            PathTask t{fi, 0};
            moves_.push_back(t);
            return candidate_for(t);
        }
        return std::nullopt;
    }

    TransmitCandidate candidate_for(const PathTask& t) const {
        const PathHop& h = sc_.routes[t.flow].hops[t.step];
        return {{h.tx, h.rx, dist(positions_[h.tx], positions_[h.rx]), false}, t.flow};
    }

    static uint32_t phase_queue_of(uint8_t hop_phase) {
        switch (hop_phase) {
            case kPhaseAccess: return 0;
            case kPhaseHorizontal: return 1;
            case kPhaseVertical: return 2;
            default: return 3;  // delivery
        }
    }

    void apply_move(const PathTask& t, uint64_t slot) {
        const Route& r = sc_.routes[t.flow];
        uint32_t next = t.step + 1;
        if (next >= r.hops.size()) {
            inject_.on_deliver(t.flow);
            tb_.delivered(slot, t.flow, static_cast<uint32_t>(r.hops.size()));
            return;
        }
        const PathHop& h = r.hops[next];
        q_[phase_queue_of(h.phase) * sc_.cells.cell_count() + h.tx_cell].push_back(
            {t.flow, next});
    }

    uint64_t q_total() const {
        uint64_t q = inject_.source_backlog_total();
        for (const auto& dq : q_) q += dq.size();
        return q;
    }

    uint64_t inflight_transmissions() const {
        uint64_t s = 0;
        for (const auto& dq : q_)
            for (const PathTask& t : dq) s += t.step;
        return s;
    }

    const Scenario& sc_;
    TraceBuilder& tb_;
    std::vector<Point> positions_;
    std::vector<std::deque<PathTask>> q_;  // [phase * cells + cell]
    std::vector<std::vector<uint32_t>> flows_in_cell_;
    std::vector<uint32_t> inject_rr_;
    InjectState inject_;
    std::vector<PathTask> moves_;
};

// ---------------------------------------------------------------------------
// two-hop mobile driver
// ---------------------------------------------------------------------------

class TwoHopDriver : public TwoHopContext {
   public:
    TwoHopDriver(const Scenario& sc, TraceBuilder& tb) : sc_(sc), tb_(tb) {
        positions_ = sc.deployment.positions();
        n_ = static_cast<uint32_t>(sc.deployment.ordinary_count());
        const uint32_t F = static_cast<uint32_t>(sc.flows.flows.size());
        pool_.assign(static_cast<size_t>(n_) * F, 0);
        held_for_dest_.assign(static_cast<size_t>(n_) * n_, 0);
        flow_of_source_.assign(n_, UINT32_MAX);
        flows_by_dest_.assign(n_, {});
        for (const Flow& f : sc.flows.flows) {
            flow_of_source_[f.source] = f.flow_id;
            flows_by_dest_[f.destinations[0]].push_back(f.flow_id);
        }
    }

    void run(uint64_t T, uint64_t seed) {
        const uint32_t F = static_cast<uint32_t>(sc_.flows.flows.size());
        for (uint64_t slot = 0; slot < T; ++slot) {
            step_mobility_inplace(positions_, sc_.deployment, sc_.mobility, seed, slot);
            TwoHopSelection sel = two_hop_select(positions_, n_, sc_.two_hop, seed, slot);
            carrying_.clear();
            for (const Link& l : sel.retained) {
                TwoHopAction act = two_hop_policy(l.tx, l.rx, *this);
                switch (act.kind) {
                    case TwoHopActionKind::DeliverRelay: {
                        NodeId dest = sc_.flows.flows[act.flow_id].destinations[0];
                        pool_[size_t(l.tx) * F + act.flow_id]--;
                        held_for_dest_[size_t(l.tx) * n_ + dest]--;
                        pool_total_--;
                        tb_.delivered(slot, act.flow_id, 2);
                        carrying_.push_back(l);
                        break;
                    }
                    case TwoHopActionKind::DeliverOwn:
                        tb_.delivered(slot, act.flow_id, 1);
                        carrying_.push_back(l);
                        break;
                    case TwoHopActionKind::Handoff: {
                        NodeId dest = sc_.flows.flows[act.flow_id].destinations[0];
                        pool_[size_t(l.rx) * F + act.flow_id]++;
                        held_for_dest_[size_t(l.rx) * n_ + dest]++;
                        pool_total_++;
                        carrying_.push_back(l);
                        break;
                    }
                    case TwoHopActionKind::Idle:
                        break;
                }
            }
            if (sc_.verify_every_slot) {
                InterferenceModel m = sc_.two_hop.phys;
                if (!carrying_.empty() && !feasible_set(carrying_, positions_, m))
                    throw MalformedScheduleError("two-hop emitted infeasible set");
            }
            tb_.slot_done(slot, static_cast<uint32_t>(carrying_.size()), pool_total_);
        }
        tb_.t.inflight_transmissions_end = pool_total_;  // each relayed packet: 1 hop done
    }

    // TwoHopContext
    std::optional<uint32_t> flow_sourced_by(NodeId node) const override {
        uint32_t f = flow_of_source_[node];
        if (f == UINT32_MAX) return std::nullopt;
        return f;
    }
    NodeId flow_destination(uint32_t flow_id) const override {
        return sc_.flows.flows[flow_id].destinations[0];
    }
    std::optional<uint32_t> relay_packet_for(NodeId holder, NodeId dest) const override {
        if (held_for_dest_[size_t(holder) * n_ + dest] == 0) return std::nullopt;
        const uint32_t F = static_cast<uint32_t>(sc_.flows.flows.size());
        for (uint32_t f : flows_by_dest_[dest]) {
            if (pool_[size_t(holder) * F + f] > 0) return f;
        }
        return std::nullopt;
    }
    bool relay_can_accept(NodeId relay, uint32_t flow_id) const override {
        const uint32_t F = static_cast<uint32_t>(sc_.flows.flows.size());
        return pool_[size_t(relay) * F + flow_id] < sc_.two_hop.relay_queue_cap;
    }

   private:
    const Scenario& sc_;
    TraceBuilder& tb_;
    std::vector<Point> positions_;
    uint32_t n_ = 0;
    std::vector<uint16_t> pool_;           // (holder, flow) -> packets held
    std::vector<uint16_t> held_for_dest_;  // (holder, dest) -> total held
    std::vector<uint32_t> flow_of_source_;
    std::vector<std::vector<uint32_t>> flows_by_dest_;
    std::vector<Link> carrying_;
    uint64_t pool_total_ = 0;
};

// ---------------------------------------------------------------------------
// manual-routes greedy driver (chains, probes)
// ---------------------------------------------------------------------------

class ManualGreedyDriver {
   public:
    ManualGreedyDriver(const Scenario& sc, TraceBuilder& tb) : sc_(sc), tb_(tb) {
        positions_ = sc.deployment.positions();
        node_q_.assign(sc.deployment.size(), {});
        inject_.init(static_cast<uint32_t>(sc.flows.flows.size()), sc.injection);
    }

    void run(uint64_t T, uint64_t seed) {
        for (uint64_t slot = 0; slot < T; ++slot) {
            inject_.tick();
            // candidates: head of every node's relay queue, then eligible
            // source injections (queue length 0 sorts them after relays)
            std::vector<Link> cands;
            std::vector<int> qlens;
            std::vector<PathTask> tasks;
            std::vector<bool> is_injection;
            for (NodeId v = 0; v < node_q_.size(); ++v) {
                if (node_q_[v].empty()) continue;
                PathTask t = node_q_[v].front();
                const PathHop& h = sc_.routes[t.flow].hops[t.step];
                cands.push_back({h.tx, h.rx, dist(positions_[h.tx], positions_[h.rx]), false});
                qlens.push_back(static_cast<int>(node_q_[v].size()));
                tasks.push_back(t);
                is_injection.push_back(false);
            }
            for (const Flow& f : sc_.flows.flows) {
                if (!inject_.can_inject(f.flow_id)) continue;
                if (!node_q_[f.source].empty()) continue;  // relay-priority at the node
                const PathHop& h = sc_.routes[f.flow_id].hops[0];
                cands.push_back({h.tx, h.rx, dist(positions_[h.tx], positions_[h.rx]), false});
                qlens.push_back(0);
                tasks.push_back({f.flow_id, 0});
                is_injection.push_back(true);
            }
            LinkSet picked = greedy_feasible_set(cands, qlens, positions_, sc_.interference,
                                                 Tiebreak::LongestQueue, seed ^ slot);
            // map picked links back to their tasks by endpoints
            std::vector<bool> consumed(cands.size(), false);
            for (const Link& l : picked.carrying) {
                for (size_t i = 0; i < cands.size(); ++i) {
                    if (consumed[i] || cands[i].tx != l.tx || cands[i].rx != l.rx) continue;
                    consumed[i] = true;
                    if (is_injection[i]) {
                        inject_.on_inject(tasks[i].flow);
                    } else {
                        node_q_[l.tx].pop_front();
                    }
                    apply_move(tasks[i], slot);
                    break;
                }
            }
            verify_links(sc_, picked.carrying, positions_);
            tb_.slot_done(slot, static_cast<uint32_t>(picked.carrying.size()), q_total());
        }
        tb_.t.inflight_transmissions_end = inflight_transmissions();
    }

   private:
    void apply_move(const PathTask& t, uint64_t slot) {
        const Route& r = sc_.routes[t.flow];
        uint32_t next = t.step + 1;
        if (next >= r.hops.size()) {
            inject_.on_deliver(t.flow);
            tb_.delivered(slot, t.flow, static_cast<uint32_t>(r.hops.size()));
        } else {
            node_q_[r.hops[next].tx].push_back({t.flow, next});
        }
    }

    uint64_t q_total() const {
        uint64_t q = inject_.source_backlog_total();
        for (const auto& dq : node_q_) q += dq.size();
        return q;
    }

    uint64_t inflight_transmissions() const {
        uint64_t s = 0;
        for (const auto& dq : node_q_)
            for (const PathTask& t : dq) s += t.step;
        return s;
    }

    const Scenario& sc_;
    TraceBuilder& tb_;
    std::vector<Point> positions_;
    std::vector<std::deque<PathTask>> node_q_;
    InjectState inject_;
};

}  // namespace

RunTrace run(const Scenario& scenario, uint64_t T, uint64_t seed) {
    if (T < 1) throw InvalidScenarioError("run: T must be >= 1");
    TraceBuilder tb;
    tb.begin(T, scenario.warmup_frac, static_cast<uint32_t>(scenario.deployment.ordinary_count()),
             static_cast<uint32_t>(scenario.flows.flows.size()), seed);

    switch (scenario.scheduler) {
        case SchedulerId::CellTdmaStraightline:
        case SchedulerId::MulticastCds:
        case SchedulerId::Hybrid: {
            CellTdmaDriver d(scenario, tb);
            d.run(T);
            break;
        }
        case SchedulerId::Highway4Phase: {
            HighwayDriver d(scenario, tb);
            d.run(T);
            break;
        }
        case SchedulerId::TwoHopMobile: {
            TwoHopDriver d(scenario, tb);
            d.run(T, seed);
            break;
        }
        case SchedulerId::ManualGreedy: {
            ManualGreedyDriver d(scenario, tb);
            d.run(T, seed);
            break;
        }
    }
    if (!tb.t.conservation_ok())
        throw MalformedScheduleError("transmission conservation identity violated");
    return tb.t;
}

StabilityVerdict stability_check(const RunTrace& trace, double eps_per_node) {
    if (trace.horizon < 2 * trace.warmup)
        throw InvalidScenarioError("stability_check: need T >= 2 * warmup");
    StabilityVerdict v;
    v.epsilon = eps_per_node * static_cast<double>(trace.n_ordinary);
    const uint64_t lo = trace.warmup, hi = trace.horizon;
    const double m = static_cast<double>(hi - lo);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (uint64_t t = lo; t < hi; ++t) {
        double x = static_cast<double>(t - lo);
        double y = static_cast<double>(trace.in_transit[t]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = m * sxx - sx * sx;
    v.slope = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    v.stable = v.slope <= v.epsilon;
    return v;
}

Metrics measure(const RunTrace& trace, double W) {
    if (trace.horizon <= trace.warmup)
        throw InvalidScenarioError("measure: post-warmup window is empty");
    if (trace.delivered_window == 0)
        throw MetricsUndefinedError("measure: zero deliveries in the measurement window");

    Metrics m;
    m.W = W;
    const double span = static_cast<double>(trace.horizon - trace.warmup);
    m.delivered = trace.delivered_window;
    m.eta = static_cast<double>(trace.delivered_window) / span * W;
    m.Y = static_cast<double>(trace.sum_Yt_window) / span;
    m.k = static_cast<double>(trace.hops_delivered_window) /
          static_cast<double>(trace.delivered_window);
    m.residual = std::abs(m.eta - m.Y * W / m.k) / m.eta;

    double lmin = std::numeric_limits<double>::infinity(), lmax = 0.0, lsum = 0.0;
    for (uint64_t d : trace.delivered_per_flow_window) {
        double rate = static_cast<double>(d) / span * W;
        lmin = std::min(lmin, rate);
        lmax = std::max(lmax, rate);
        lsum += rate;
    }
    m.lambda_min = lmin;
    m.lambda_max = lmax;
    m.lambda_mean = lsum / static_cast<double>(trace.delivered_per_flow_window.size());
    m.fairness_ratio = lmin > 0.0 ? lmax / lmin : 0.0;

    StabilityVerdict v = stability_check(trace);
    m.stable = v.stable;
    m.q_slope = v.slope;
    return m;
}

double binary_search_throughput(const Scenario& scenario, uint64_t T, double tol, uint64_t seed) {
    auto stable_at = [&](double rate) {
        Scenario sc = scenario;
        sc.injection.mode = Injection::Mode::FixedRate;
        sc.injection.rate = rate;
        RunTrace tr = run(sc, T, seed);
        return stability_check(tr).stable;
    };
    double lo = 0.0, hi = 1.0;
    if (stable_at(hi)) return hi;
    if (!stable_at(1e-6))
        throw InvalidScenarioError("binary_search_throughput: unstable at near-zero rate");
    lo = 1e-6;
    while (hi - lo > tol * hi) {
        double mid = 0.5 * (lo + hi);
        if (stable_at(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace capnet
