#pragma once

#include <cmath>
#include <cstdint>

namespace capnet {

using NodeId = uint32_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double dist2(const Point& a, const Point& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

}  // namespace capnet
