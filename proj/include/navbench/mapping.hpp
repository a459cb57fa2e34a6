#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "navbench/geometry.hpp"
#include "navbench/grid.hpp"
#include "navbench/scene.hpp"

namespace navbench {

enum class BeliefCell : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

// The agent's belief grid. Same dimensions and resolution as the scene grid
// it shadows; every cell starts unknown.
struct OccupancyGrid {
    Grid<std::uint8_t> cells; // BeliefCell values
    double resolution_m = 0.05;
    Vec2 origin; // world coordinate of cell (0,0)

    OccupancyGrid() = default;
    OccupancyGrid(int width, int height, double res)
        : cells(width, height, static_cast<std::uint8_t>(BeliefCell::Unknown)),
          resolution_m(res) {}

    static OccupancyGrid shadow_of(const Scene& scene) {
        return OccupancyGrid(scene.grid.width(), scene.grid.height(), scene.resolution_m);
    }

    BeliefCell at(const GridCell& c) const { return static_cast<BeliefCell>(cells.at(c)); }
    void set(const GridCell& c, BeliefCell v) { cells.at(c) = static_cast<std::uint8_t>(v); }

    bool known_free(const GridCell& c) const {
        return cells.in_bounds(c) && at(c) == BeliefCell::Free;
    }
    bool known_occupied(const GridCell& c) const {
        return cells.in_bounds(c) && at(c) == BeliefCell::Occupied;
    }

    std::size_t count(BeliefCell v) const {
        std::size_t n = 0;
        for (std::uint8_t c : cells.cells())
            if (c == static_cast<std::uint8_t>(v)) ++n;
        return n;
    }
};

// Ray-casts an observation into the belief grid: every cell a ray crosses
// before its hit becomes free, the hit cell becomes occupied. Occupied beats
// free within one call; across calls the last write wins. Cells are never
// reverted to unknown.
inline void integrate(OccupancyGrid& grid, const Pose& pose, const Observation& obs) {
    std::vector<GridCell> hits;
    hits.reserve(obs.depth.size());
    for (const DepthRay& ray : obs.depth) {
        const double r = deg_to_rad(pose.heading_deg + ray.angle_deg);
        const Vec2 dir{std::cos(r), std::sin(r)};
        // Re-walk the ray the sensor walked; entry parameters match exactly.
        march_cells(pose.position, dir, ray.range_m, grid.resolution_m,
                    [&](const GridCell& c, double t) {
                        if (!grid.cells.in_bounds(c)) return true;
                        if (ray.hit && t >= ray.range_m) {
                            hits.push_back(c);
                            return false;
                        }
                        grid.set(c, BeliefCell::Free);
                        return true;
                    });
    }
    for (const GridCell& c : hits) grid.set(c, BeliefCell::Occupied);
}

// Functional form.
inline OccupancyGrid integrated(OccupancyGrid grid, const Pose& pose, const Observation& obs) {
    integrate(grid, pose, obs);
    return grid;
}

// Frontier cells: free cells with at least one unknown 8-neighbour, in
// row-major order.
inline std::vector<GridCell> extract_frontiers(const OccupancyGrid& grid) {
    std::vector<GridCell> out;
    const int w = grid.cells.width();
    const int h = grid.cells.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (grid.at({x, y}) != BeliefCell::Free) continue;
            bool frontier = false;
            for (int k = 0; k < 8 && !frontier; ++k) {
                const int nx = x + kNeighbor8X[k];
                const int ny = y + kNeighbor8Y[k];
                if (grid.cells.in_bounds(nx, ny) &&
                    static_cast<BeliefCell>(grid.cells.at(nx, ny)) == BeliefCell::Unknown) {
                    frontier = true;
                }
            }
            if (frontier) out.push_back({x, y});
        }
    }
    return out;
}

// Debug dump as plain-text PGM (P2): unknown=128, free=255, occupied=0.
// Row 0 is written first.
inline void write_pgm(const OccupancyGrid& grid, std::ostream& os) {
    os << "P2\n" << grid.cells.width() << ' ' << grid.cells.height() << "\n255\n";
    for (int y = 0; y < grid.cells.height(); ++y) {
        for (int x = 0; x < grid.cells.width(); ++x) {
            int v = 128;
            switch (grid.at({x, y})) {
                case BeliefCell::Unknown: v = 128; break;
                case BeliefCell::Free: v = 255; break;
                case BeliefCell::Occupied: v = 0; break;
            }
            os << v << (x + 1 == grid.cells.width() ? '\n' : ' ');
        }
    }
}

} // namespace navbench
