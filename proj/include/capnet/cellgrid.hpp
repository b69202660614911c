#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "capnet/deploy.hpp"
#include "capnet/geometry.hpp"

namespace capnet {

using CellIndex = uint32_t;

// Square-grid tessellation of [0, a]^2 with nodes binned by floor division.
// The grid side count is derived so cells tile the area exactly.
struct CellGraph {
    double cell_side = 0.0;
    uint32_t nx = 0;  // columns
    uint32_t ny = 0;  // rows
    bool eight_adjacent = true;
    std::vector<std::vector<NodeId>> occupancy;  // cell -> node ids (sorted)

    uint32_t cell_count() const { return nx * ny; }
    CellIndex cell_of(const Point& p) const;
    CellIndex index(uint32_t i, uint32_t j) const { return j * nx + i; }
    uint32_t col(CellIndex c) const { return c % nx; }
    uint32_t row(CellIndex c) const { return c / nx; }
    Point center(CellIndex c) const {
        return {(col(c) + 0.5) * cell_side, (row(c) + 0.5) * cell_side};
    }
    bool empty_cell(CellIndex c) const { return occupancy[c].empty(); }
    // lowest node id in the cell, the designated relay
    std::optional<NodeId> relay(CellIndex c) const {
        if (occupancy[c].empty()) return std::nullopt;
        return occupancy[c].front();
    }
    bool adjacent(CellIndex a, CellIndex b) const;
};

// Grid covering [0,a]^2; nx = round(a / cell_side) clamped to >= 1, cells
// resized to tile exactly.
CellGraph build_cells(const Deployment& dep, double cell_side);

// Cells crossed by the segment p0 -> p1, strictly 4-connected (corner
// crossings step x before y). First cell contains p0, last contains p1.
std::vector<CellIndex> crossed_cells(const CellGraph& g, const Point& p0, const Point& p1);

// Nearest node to p among candidates binned in g (expanding ring search).
// Returns nullopt when the grid holds no candidate.
std::optional<NodeId> nearest_node(const CellGraph& g, const Point& p,
                                   std::span<const Point> positions);

// BFS shortest cell path between two cells restricted to non-empty cells
// (plus the endpoints). Used as the routing-hole detour.
std::optional<std::vector<CellIndex>> occupied_cell_path(const CellGraph& g, CellIndex from,
                                                         CellIndex to);

}  // namespace capnet
