#include "capnet/cellgrid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <span>

#include "capnet/errors.hpp"

namespace capnet {

CellIndex CellGraph::cell_of(const Point& p) const {
    auto clampi = [](int32_t v, int32_t hi) { return std::min(std::max(v, 0), hi); };
    int32_t i = clampi(static_cast<int32_t>(std::floor(p.x / cell_side)), nx - 1);
    int32_t j = clampi(static_cast<int32_t>(std::floor(p.y / cell_side)), ny - 1);
    return index(i, j);
}

bool CellGraph::adjacent(CellIndex a, CellIndex b) const {
    int32_t di = std::abs(static_cast<int32_t>(col(a)) - static_cast<int32_t>(col(b)));
    int32_t dj = std::abs(static_cast<int32_t>(row(a)) - static_cast<int32_t>(row(b)));
    if (eight_adjacent) return std::max(di, dj) == 1 || (di == 0 && dj == 0);
    return di + dj == 1;
}

CellGraph build_cells(const Deployment& dep, double cell_side) {
    if (!(cell_side > 0.0)) throw InvalidScenarioError("build_cells: cell_side must be > 0");
    CellGraph g;
    uint32_t n_side =
        std::max<uint32_t>(1, static_cast<uint32_t>(std::round(dep.area_side / cell_side)));
    g.nx = g.ny = n_side;
    g.cell_side = dep.area_side / n_side;  // exact tiling
    g.occupancy.assign(g.cell_count(), {});
    for (const auto& node : dep.nodes) {
        if (node.kind != NodeKind::Ordinary) continue;
        g.occupancy[g.cell_of(node.pos)].push_back(node.id);
    }
    for (auto& v : g.occupancy) std::sort(v.begin(), v.end());
    return g;
}

std::vector<CellIndex> crossed_cells(const CellGraph& g, const Point& p0, const Point& p1) {
    std::vector<CellIndex> cells;
    const double cs = g.cell_side;
    auto clampi = [](int32_t v, int32_t hi) { return std::min(std::max(v, 0), hi); };
    int32_t ci = clampi(static_cast<int32_t>(std::floor(p0.x / cs)), g.nx - 1);
    int32_t cj = clampi(static_cast<int32_t>(std::floor(p0.y / cs)), g.ny - 1);
    int32_t ti = clampi(static_cast<int32_t>(std::floor(p1.x / cs)), g.nx - 1);
    int32_t tj = clampi(static_cast<int32_t>(std::floor(p1.y / cs)), g.ny - 1);
    cells.push_back(g.index(ci, cj));

    double dx = p1.x - p0.x, dy = p1.y - p0.y;
    int32_t sx = dx > 0 ? 1 : -1;
    int32_t sy = dy > 0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    double t_max_x = dx != 0 ? ((ci + (sx > 0 ? 1 : 0)) * cs - p0.x) / dx : inf;
    double t_max_y = dy != 0 ? ((cj + (sy > 0 ? 1 : 0)) * cs - p0.y) / dy : inf;
    double t_dx = dx != 0 ? std::abs(cs / dx) : inf;
    double t_dy = dy != 0 ? std::abs(cs / dy) : inf;

    // worst case path length nx+ny; the guard only trips on degenerate fp input
    for (uint32_t guard = 0; guard < 4 * (g.nx + g.ny) && (ci != ti || cj != tj); ++guard) {
        if (t_max_x <= t_max_y) {  // ties step x first: 4-connected walk
            ci += sx;
            t_max_x += t_dx;
        } else {
            cj += sy;
            t_max_y += t_dy;
        }
        ci = clampi(ci, g.nx - 1);
        cj = clampi(cj, g.ny - 1);
        if (cells.back() != g.index(ci, cj)) cells.push_back(g.index(ci, cj));
    }
    return cells;
}

std::optional<NodeId> nearest_node(const CellGraph& g, const Point& p,
                                   std::span<const Point> positions) {
    CellIndex c0 = g.cell_of(p);
    int32_t i0 = g.col(c0), j0 = g.row(c0);
    double best = std::numeric_limits<double>::infinity();
    std::optional<NodeId> best_id;
    int32_t max_ring = std::max(g.nx, g.ny);
    for (int32_t ring = 0; ring <= max_ring; ++ring) {
        // once a candidate is found, one extra ring suffices: anything farther
        // out is at least ring*cell_side away
        if (best_id && best <= (ring - 1) * g.cell_side * (ring - 1) * g.cell_side) break;
        for (int32_t j = j0 - ring; j <= j0 + ring; ++j) {
            if (j < 0 || j >= static_cast<int32_t>(g.ny)) continue;
            for (int32_t i = i0 - ring; i <= i0 + ring; ++i) {
                if (i < 0 || i >= static_cast<int32_t>(g.nx)) continue;
                if (std::max(std::abs(i - i0), std::abs(j - j0)) != ring) continue;
                for (NodeId id : g.occupancy[g.index(i, j)]) {
                    double d = dist2(positions[id], p);
                    if (d < best) {
                        best = d;
                        best_id = id;
                    }
                }
            }
        }
    }
    return best_id;
}

std::optional<std::vector<CellIndex>> occupied_cell_path(const CellGraph& g, CellIndex from,
                                                         CellIndex to) {
    std::vector<int32_t> parent(g.cell_count(), -1);
    std::deque<CellIndex> q;
    parent[from] = static_cast<int32_t>(from);
    q.push_back(from);
    auto passable = [&](CellIndex c) { return c == to || c == from || !g.empty_cell(c); };
    while (!q.empty()) {
        CellIndex c = q.front();
        q.pop_front();
        if (c == to) break;
        int32_t ci = g.col(c), cj = g.row(c);
        // 4-neighbors first keeps detour hops short; diagonals still allowed
        static const int32_t di[8] = {1, -1, 0, 0, 1, 1, -1, -1};
        static const int32_t dj[8] = {0, 0, 1, -1, 1, -1, 1, -1};
        int neighbors = g.eight_adjacent ? 8 : 4;
        for (int k = 0; k < neighbors; ++k) {
            int32_t ni = ci + di[k], nj = cj + dj[k];
            if (ni < 0 || nj < 0 || ni >= static_cast<int32_t>(g.nx) ||
                nj >= static_cast<int32_t>(g.ny))
                continue;
            CellIndex nc = g.index(ni, nj);
            if (parent[nc] != -1 || !passable(nc)) continue;
            parent[nc] = static_cast<int32_t>(c);
            q.push_back(nc);
        }
    }
    if (parent[to] == -1) return std::nullopt;
    std::vector<CellIndex> path;
    for (CellIndex c = to;; c = static_cast<CellIndex>(parent[c])) {
        path.push_back(c);
        if (c == from) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace capnet
