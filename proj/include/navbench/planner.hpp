#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

#include "navbench/errors.hpp"
#include "navbench/geometry.hpp"
#include "navbench/grid.hpp"
#include "navbench/mapping.hpp"
#include "navbench/scene.hpp"
#include "navbench/valuemaps.hpp"

namespace navbench {

inline constexpr double kCostFloor = 0.05;
inline constexpr double kWaypointReachedM = 0.10;
inline constexpr double kAlignToleranceDeg = 15.0;

// Grid path from start to target inclusive; consecutive cells are 8-neighbors
// and length_m sums the metric step lengths.
struct Path {
    std::vector<GridCell> cells;
    double length_m = 0.0;
};

namespace detail {

struct HeapEntry {
    double key;
    std::size_t idx;
};

struct HeapOrder {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        if (a.key != b.key) return a.key > b.key;
        return a.idx > b.idx;
    }
};

// Diagonal moves must not cut corners: both orthogonal neighbors have to be
// traversable too.
template <typename FreeFn>
bool step_allowed(const FreeFn& is_free, int x, int y, int dx, int dy) {
    if (!is_free(x + dx, y + dy)) return false;
    if (dx != 0 && dy != 0) {
        if (!is_free(x + dx, y) || !is_free(x, y + dy)) return false;
    }
    return true;
}

} // namespace detail

inline Grid<std::uint8_t> believed_free_mask(const OccupancyGrid& grid) {
    Grid<std::uint8_t> mask(grid.cells.width(), grid.cells.height(), 0);
    for (std::size_t i = 0; i < grid.cells.size(); ++i)
        mask.cells()[i] = static_cast<BeliefCell>(grid.cells.cells()[i]) == BeliefCell::Free;
    return mask;
}

inline Grid<std::uint8_t> true_free_mask(const Scene& scene) {
    Grid<std::uint8_t> mask(scene.grid.width(), scene.grid.height(), 0);
    for (int y = 0; y < scene.grid.height(); ++y)
        for (int x = 0; x < scene.grid.width(); ++x)
            mask.at(x, y) = scene.free_cell(GridCell{x, y});
    return mask;
}

// Metric geodesic distance (meters) from the sources to every cell over the
// free mask, 8-connected without corner cutting; unreachable cells are +inf.
inline Grid<double> geodesic_distances(const Grid<std::uint8_t>& free,
                                       const std::vector<GridCell>& sources,
                                       double resolution_m) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    Grid<double> dist(free.width(), free.height(), kInf);

    const auto is_free = [&](int x, int y) {
        return free.in_bounds(GridCell{x, y}) && free.at(x, y) != 0;
    };
    const double diag = std::numbers::sqrt2 * resolution_m;

    std::priority_queue<detail::HeapEntry, std::vector<detail::HeapEntry>, detail::HeapOrder> open;
    for (const GridCell& src : sources) {
        if (!free.in_bounds(src) || !free.at(src)) continue;
        dist.at(src) = 0.0;
        open.push({0.0, free.index(src)});
    }
    while (!open.empty()) {
        const auto [g, idx] = open.top();
        open.pop();
        if (g > dist.cells()[idx]) continue;
        const GridCell c = free.cell_at(idx);
        for (int k = 0; k < 8; ++k) {
            const int dx = kNeighbor8X[k], dy = kNeighbor8Y[k];
            if (!detail::step_allowed(is_free, c.x, c.y, dx, dy)) continue;
            const double nd = g + (k < 4 ? resolution_m : diag);
            const std::size_t ni = free.index(GridCell{c.x + dx, c.y + dy});
            if (nd < dist.cells()[ni]) {
                dist.cells()[ni] = nd;
                open.push({nd, ni});
            }
        }
    }
    return dist;
}

inline Grid<double> geodesic_distances(const Grid<std::uint8_t>& free, GridCell src,
                                       double resolution_m) {
    return geodesic_distances(free, std::vector<GridCell>{src}, resolution_m);
}

// A* over believed-free cells. Entering cell x costs
// max(1 - aff(x), c_min) * step_length; the heuristic is straight-line
// distance times c_min, deflated a hair so float rounding can never make it
// inconsistent. Returns nullopt when the target is unreachable in the belief.
inline std::optional<Path> plan(const OccupancyGrid& grid, const ValueField& aff,
                                GridCell start, GridCell target,
                                double c_min = kCostFloor) {
    require(aff.values.same_shape(grid.cells), "plan: field/grid shape mismatch");
    require(grid.cells.in_bounds(start) && grid.known_free(start), "plan: start not believed free");
    require(grid.cells.in_bounds(target) && grid.known_free(target),
            "plan: target not believed free");

    const Grid<std::uint8_t>& belief = grid.cells;
    const double res = grid.resolution_m;
    const auto is_free = [&](int x, int y) {
        return belief.in_bounds(GridCell{x, y}) &&
               static_cast<BeliefCell>(belief.at(x, y)) == BeliefCell::Free;
    };
    const auto heuristic = [&](GridCell c) {
        const double dx = (c.x - target.x) * res;
        const double dy = (c.y - target.y) * res;
        return std::sqrt(dx * dx + dy * dy) * c_min * (1.0 - 1e-9);
    };
    const double diag = std::numbers::sqrt2 * res;

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> g(belief.size(), kInf);
    std::vector<std::uint32_t> parent(belief.size(), 0);
    std::vector<std::uint8_t> closed(belief.size(), 0);
    std::priority_queue<detail::HeapEntry, std::vector<detail::HeapEntry>, detail::HeapOrder> open;

    const std::size_t si = belief.index(start);
    const std::size_t ti = belief.index(target);
    g[si] = 0.0;
    open.push({heuristic(start), si});
    while (!open.empty()) {
        const std::size_t idx = open.top().idx;
        open.pop();
        if (closed[idx]) continue;
        closed[idx] = 1;
        if (idx == ti) break;
        const GridCell c = belief.cell_at(idx);
        for (int k = 0; k < 8; ++k) {
            const int dx = kNeighbor8X[k], dy = kNeighbor8Y[k];
            if (!detail::step_allowed(is_free, c.x, c.y, dx, dy)) continue;
            const GridCell n{c.x + dx, c.y + dy};
            const std::size_t ni = belief.index(n);
            if (closed[ni]) continue;
            const double step = k < 4 ? res : diag;
            const double nd = g[idx] + std::max(1.0 - aff.values.cells()[ni], c_min) * step;
            if (nd < g[ni]) {
                g[ni] = nd;
                parent[ni] = static_cast<std::uint32_t>(idx);
                open.push({nd + heuristic(n), ni});
            }
        }
    }
    if (!closed[ti]) return std::nullopt;

    Path path;
    for (std::size_t idx = ti;; idx = parent[idx]) {
        path.cells.push_back(belief.cell_at(idx));
        if (idx == si) break;
    }
    std::reverse(path.cells.begin(), path.cells.end());
    for (std::size_t i = 1; i < path.cells.size(); ++i) {
        const bool diagonal = path.cells[i].x != path.cells[i - 1].x &&
                              path.cells[i].y != path.cells[i - 1].y;
        path.length_m += diagonal ? diag : res;
    }
    return path;
}

// Total traversal cost of a path under the same model plan() optimizes,
// summed in path order.
inline double path_cost(const Path& path, const ValueField& aff, double resolution_m,
                        double c_min = kCostFloor) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.cells.size(); ++i) {
        const bool diagonal = path.cells[i].x != path.cells[i - 1].x &&
                              path.cells[i].y != path.cells[i - 1].y;
        const double step = diagonal ? std::numbers::sqrt2 * resolution_m : resolution_m;
        total += std::max(1.0 - aff.values.at(path.cells[i]), c_min) * step;
    }
    return total;
}

// Discrete-action bridge: waypoints within 0.10 m are considered reached and
// skipped; facing the next one within 15 degrees drives forward, otherwise
// turn the shorter way (exact 180 turns left). With every waypoint reached
// the agent turns left to refresh its view until the next replan.
inline Action next_action(const Pose& pose, const Path& path, double resolution_m) {
    require(!path.cells.empty(), "next_action: empty path");
    const GridCell* waypoint = nullptr;
    for (const GridCell& c : path.cells) {
        if (distance(pose.position, cell_center(c, resolution_m)) > kWaypointReachedM) {
            waypoint = &c;
            break;
        }
    }
    if (waypoint == nullptr) return Action::TurnLeft;

    const Vec2 w = cell_center(*waypoint, resolution_m);
    const double bearing =
        rad_to_deg(std::atan2(w.y - pose.position.y, w.x - pose.position.x));
    const double rel = wrap_deg(bearing - pose.heading_deg);
    if (std::abs(rel) <= kAlignToleranceDeg) return Action::Forward;
    return rel > 0.0 ? Action::TurnLeft : Action::TurnRight;
}

// Cells from which a goal instance of the scene's goal category is both
// within the success radius and in line of sight.
inline std::vector<GridCell> success_region(const Scene& scene) {
    std::vector<GridCell> region;
    const double res = scene.resolution_m;
    const int r = static_cast<int>(std::ceil(kSuccessRadiusM / res)) + 1;
    for (const ObjectInstance& obj : scene.objects) {
        if (obj.category != scene.goal_category) continue;
        const GridCell a = cell_of(obj.anchor, res);
        for (int y = a.y - r; y <= a.y + r; ++y) {
            for (int x = a.x - r; x <= a.x + r; ++x) {
                const GridCell c{x, y};
                if (!scene.grid.in_bounds(c)) continue;
                const Vec2 p = cell_center(c, res);
                if (distance(p, obj.anchor) > kSuccessRadiusM) continue;
                if (!detail::segment_clear(scene, p, obj.anchor)) continue;
                region.push_back(c);
            }
        }
    }
    std::sort(region.begin(), region.end(), row_major_less);
    region.erase(std::unique(region.begin(), region.end()), region.end());
    return region;
}

// Ground-truth shortest-path distance from the start to the success region,
// the ell-star term of SPL. Zero when the start cell already qualifies.
inline double shortest_path_length(const Scene& scene, const Pose& start) {
    const std::vector<GridCell> region = success_region(scene);
    require(!region.empty(), "shortest_path_length: goal has no reachable success region");
    const GridCell sc = cell_of(start.position, scene.resolution_m);
    const Grid<double> dist =
        geodesic_distances(true_free_mask(scene), sc, scene.resolution_m);
    double best = std::numeric_limits<double>::infinity();
    for (const GridCell& c : region) best = std::min(best, dist.at(c));
    require(std::isfinite(best), "shortest_path_length: success region unreachable");
    return best;
}

// Believed-free cell nearest to seed by straight-line distance (ties resolve
// in row-major order). Used to snap off-grid or not-yet-free targets onto the
// plannable set.
inline GridCell nearest_believed_free(const OccupancyGrid& grid, GridCell seed) {
    bool found = false;
    GridCell best{0, 0};
    long best_d2 = 0;
    for (int y = 0; y < grid.cells.height(); ++y) {
        for (int x = 0; x < grid.cells.width(); ++x) {
            if (!grid.known_free(GridCell{x, y})) continue;
            const long dx = x - seed.x, dy = y - seed.y;
            const long d2 = dx * dx + dy * dy;
            if (!found || d2 < best_d2) {
                found = true;
                best = GridCell{x, y};
                best_d2 = d2;
            }
        }
    }
    require(found, "nearest_believed_free: no believed-free cells");
    return best;
}

} // namespace navbench
