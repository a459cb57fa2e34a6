#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace navbench {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double norm() const { return std::sqrt(x * x + y * y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

struct GridCell {
    int x = 0;
    int y = 0;

    bool operator==(const GridCell& o) const { return x == o.x && y == o.y; }
    bool operator!=(const GridCell& o) const { return !(*this == o); }
};

// Row-major ordering: by row (y), then column (x).
inline bool row_major_less(const GridCell& a, const GridCell& b) {
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

// (x, y) tuple order.
inline bool cell_lex_less(const GridCell& a, const GridCell& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle in degrees to (-180, 180].
inline double wrap_deg(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a <= -180.0) a += 360.0;
    if (a > 180.0) a -= 360.0;
    return a;
}

inline Vec2 heading_dir(int heading_deg) {
    double r = deg_to_rad(static_cast<double>(heading_deg));
    return {std::cos(r), std::sin(r)};
}

// Cell containing a continuous point; cells are half-open squares
// [x*res, (x+1)*res) x [y*res, (y+1)*res).
inline GridCell cell_of(const Vec2& p, double res) {
    return {static_cast<int>(std::floor(p.x / res)),
            static_cast<int>(std::floor(p.y / res))};
}

inline Vec2 cell_center(const GridCell& c, double res) {
    return {(c.x + 0.5) * res, (c.y + 0.5) * res};
}

// Walks the cells crossed by the ray origin + t*dir for t in [0, t_max],
// calling visit(cell, t_entry) in order of entry. The origin cell is visited
// with t_entry = 0. When the ray passes exactly through a lattice corner the
// two orthogonal neighbours are visited (x side first) before the diagonal
// cell, so grazing an occupied corner counts as crossing it. The visitor
// returns false to stop the walk. Cells outside any grid are still visited;
// bounds are the visitor's concern.
template <class Visitor>
void march_cells(const Vec2& origin, Vec2 dir, double t_max, double res, Visitor&& visit) {
    double n = dir.norm();
    if (n <= 0.0 || t_max < 0.0) {
        visit(cell_of(origin, res), 0.0);
        return;
    }
    dir = dir * (1.0 / n);

    GridCell c = cell_of(origin, res);
    if (!visit(c, 0.0)) return;

    const int sx = dir.x > 0.0 ? 1 : (dir.x < 0.0 ? -1 : 0);
    const int sy = dir.y > 0.0 ? 1 : (dir.y < 0.0 ? -1 : 0);
    if (sx == 0 && sy == 0) return;

    const double inf = std::numeric_limits<double>::infinity();
    const double tdx = sx != 0 ? res / std::abs(dir.x) : inf;
    const double tdy = sy != 0 ? res / std::abs(dir.y) : inf;

    // t of the first boundary crossing along each axis.
    double tx = inf;
    double ty = inf;
    if (sx > 0) tx = ((c.x + 1) * res - origin.x) / dir.x;
    if (sx < 0) tx = (c.x * res - origin.x) / dir.x;
    if (sy > 0) ty = ((c.y + 1) * res - origin.y) / dir.y;
    if (sy < 0) ty = (c.y * res - origin.y) / dir.y;

    while (true) {
        const double t = std::min(tx, ty);
        if (t > t_max) return;
        if (tx == ty) {
            // Exact corner crossing.
            if (!visit({c.x + sx, c.y}, t)) return;
            if (!visit({c.x, c.y + sy}, t)) return;
            c = {c.x + sx, c.y + sy};
            tx += tdx;
            ty += tdy;
        } else if (tx < ty) {
            c.x += sx;
            tx += tdx;
        } else {
            c.y += sy;
            ty += tdy;
        }
        if (!visit(c, t)) return;
    }
}

} // namespace navbench
