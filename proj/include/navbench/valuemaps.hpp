#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "navbench/errors.hpp"
#include "navbench/geometry.hpp"
#include "navbench/grid.hpp"
#include "navbench/islands.hpp"
#include "navbench/mapping.hpp"
#include "navbench/scene.hpp"

namespace navbench {

enum class FieldKind : std::uint8_t { Avm, Trajectory, Affordance, Cost };

// Scalar score per grid cell, aligned with the belief grid.
struct ValueField {
    Grid<double> values;
    FieldKind kind = FieldKind::Avm;

    ValueField() = default;
    ValueField(int w, int h, FieldKind k, double fill = 0.0) : values(w, h, fill), kind(k) {}
};

enum class SelectorMode : std::uint8_t {
    Dwfe,
    Shf,
    NearestFrontierBaseline,
    RandomFrontierBaseline,
    GoalDirected,
};

inline const char* selector_mode_name(SelectorMode m) {
    switch (m) {
        case SelectorMode::Dwfe: return "dwfe";
        case SelectorMode::Shf: return "shf";
        case SelectorMode::NearestFrontierBaseline: return "nearest_frontier";
        case SelectorMode::RandomFrontierBaseline: return "random_frontier";
        case SelectorMode::GoalDirected: return "goal_directed";
    }
    return "?";
}

// Accepts the report names plus the short CLI spellings.
inline SelectorMode selector_mode_from_string(const std::string& s) {
    if (s == "dwfe") return SelectorMode::Dwfe;
    if (s == "shf") return SelectorMode::Shf;
    if (s == "nearest" || s == "nearest_frontier") return SelectorMode::NearestFrontierBaseline;
    if (s == "random" || s == "random_frontier") return SelectorMode::RandomFrontierBaseline;
    if (s == "goal_directed") return SelectorMode::GoalDirected;
    throw ContractViolation("unknown selector mode: " + s);
}

enum class DwfeAggregate : std::uint8_t { Sum, Max };

namespace detail {

// One-dimensional squared distance transform (lower envelope of parabolas).
inline void dt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                  std::vector<double>& z, int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -1e30;
    z[1] = 1e30;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * static_cast<double>(q)) -
                    (f[v[k]] + v[k] * static_cast<double>(v[k]))) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * static_cast<double>(q)) -
                 (f[v[k]] + v[k] * static_cast<double>(v[k]))) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = 1e30;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - static_cast<double>(v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

// Exact squared Euclidean distance (in cell units) from every cell to the
// nearest site. Sites are given as a mask; non-site cells start at a large
// finite sentinel rather than infinity so the parabola arithmetic stays finite.
inline Grid<double> squared_distance_field(int w, int h, const std::vector<GridCell>& sites) {
    constexpr double kFar = 1e20;
    Grid<double> d(w, h, kFar);
    for (const GridCell& c : sites) {
        if (d.in_bounds(c)) d.at(c) = 0.0;
    }
    const int n = std::max(w, h);
    std::vector<double> f(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    std::vector<int> v(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) + 1);

    for (int x = 0; x < w; ++x) { // columns
        for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = d.at(x, y);
        dt_1d(f, out, v, z, h);
        for (int y = 0; y < h; ++y) d.at(x, y) = out[static_cast<std::size_t>(y)];
    }
    for (int y = 0; y < h; ++y) { // rows
        for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = d.at(x, y);
        dt_1d(f, out, v, z, w);
        for (int x = 0; x < w; ++x) d.at(x, y) = out[static_cast<std::size_t>(x)];
    }
    return d;
}

} // namespace detail

// Distance-weighted frontier scores. For each island, every navigable
// (believed-free) cell x gets 1 - d(x,f)/d_max where d(x,f) is the Euclidean
// distance to the island's closest cell and d_max the largest such distance
// over navigable cells this step. Island contributions are combined per
// `aggregate` (sum by default). Non-navigable cells stay 0, and an empty
// island list yields the zero field.
inline ValueField dwfe_scores(const OccupancyGrid& grid,
                              const std::vector<FrontierIsland>& islands,
                              DwfeAggregate aggregate = DwfeAggregate::Sum) {
    const int w = grid.cells.width();
    const int h = grid.cells.height();
    ValueField field(w, h, FieldKind::Avm, 0.0);
    if (islands.empty()) return field;

    std::vector<std::size_t> navigable;
    navigable.reserve(grid.cells.size());
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        if (static_cast<BeliefCell>(grid.cells.cells()[i]) == BeliefCell::Free)
            navigable.push_back(i);
    }
    if (navigable.empty()) return field;

    for (const FrontierIsland& f : islands) {
        const Grid<double> d2 = detail::squared_distance_field(w, h, f.cells);
        double d_max = 0.0;
        for (std::size_t i : navigable) d_max = std::max(d_max, d2.cells()[i]);
        d_max = std::sqrt(d_max);
        for (std::size_t i : navigable) {
            const double score =
                d_max > 0.0 ? 1.0 - std::sqrt(d2.cells()[i]) / d_max : 1.0;
            double& v = field.values.cells()[i];
            v = aggregate == DwfeAggregate::Sum ? v + score : std::max(v, score);
        }
    }
    return field;
}

// Injects language votes: island vote differences h are min-max normalized to
// [0,1] over the islands present (all-equal maps to 0.5), then eta * h_hat is
// added on each island's cells. Values elsewhere are untouched.
inline ValueField shf_inject(const ValueField& avm, const std::vector<FrontierIsland>& islands,
                             const std::map<int, int>& h, double eta) {
    int max_id = -1;
    for (const FrontierIsland& f : islands) max_id = std::max(max_id, f.id);
    std::vector<const FrontierIsland*> lookup(static_cast<std::size_t>(max_id + 1), nullptr);
    for (const FrontierIsland& f : islands) lookup[static_cast<std::size_t>(f.id)] = &f;
    for (const auto& [id, votes] : h) {
        (void)votes;
        require(id >= 0 && id <= max_id && lookup[static_cast<std::size_t>(id)] != nullptr,
                "shf_inject: vote for island not in the island list");
    }
    if (h.empty()) return avm;

    int lo = 0, hi = 0;
    bool first = true;
    for (const auto& [id, votes] : h) {
        (void)id;
        lo = first ? votes : std::min(lo, votes);
        hi = first ? votes : std::max(hi, votes);
        first = false;
    }

    ValueField out = avm;
    for (const auto& [id, votes] : h) {
        const double h_hat =
            hi > lo ? (votes - lo) / static_cast<double>(hi - lo) : 0.5;
        for (const GridCell& c : lookup[static_cast<std::size_t>(id)]->cells) {
            out.values.at(c) += eta * h_hat;
        }
    }
    return out;
}

// Element-wise sum of aligned fields, min-max normalized to [0,1]
// (a constant sum maps to 0.5 everywhere).
inline ValueField compose_affordance(const std::vector<ValueField>& fields) {
    require(!fields.empty(), "compose_affordance: no fields");
    const Grid<double>& base = fields.front().values;
    ValueField out(base.width(), base.height(), FieldKind::Affordance, 0.0);
    for (const ValueField& f : fields) {
        require(f.values.same_shape(base), "compose_affordance: field shape mismatch");
        for (std::size_t i = 0; i < base.size(); ++i)
            out.values.cells()[i] += f.values.cells()[i];
    }
    double lo = out.values.cells()[0], hi = out.values.cells()[0];
    for (double v : out.values.cells()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi > lo) {
        const double inv = 1.0 / (hi - lo);
        for (double& v : out.values.cells()) v = (v - lo) * inv;
    } else {
        for (double& v : out.values.cells()) v = 0.5;
    }
    return out;
}

// Navigable cell with the maximal affordance; ties break to the smallest
// row-major index.
inline GridCell select_target(const ValueField& aff, const OccupancyGrid& grid) {
    require(aff.values.same_shape(grid.cells), "select_target: field/grid shape mismatch");
    bool found = false;
    std::size_t best = 0;
    double best_v = 0.0;
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        if (static_cast<BeliefCell>(grid.cells.cells()[i]) != BeliefCell::Free) continue;
        const double v = aff.values.cells()[i];
        if (!found || v > best_v) {
            found = true;
            best = i;
            best_v = v;
        }
    }
    require(found, "select_target: no navigable cell");
    return grid.cells.cell_at(best);
}

// Same, restricted to cells where mask is nonzero.
inline GridCell select_target_masked(const ValueField& aff, const Grid<std::uint8_t>& mask) {
    require(aff.values.same_shape(mask), "select_target_masked: field/mask shape mismatch");
    bool found = false;
    std::size_t best = 0;
    double best_v = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask.cells()[i]) continue;
        const double v = aff.values.cells()[i];
        if (!found || v > best_v) {
            found = true;
            best = i;
            best_v = v;
        }
    }
    require(found, "select_target_masked: empty mask");
    return mask.cell_at(best);
}

// Cell containing the centroid of the accumulated goal sightings.
inline GridCell goal_directed_target(const std::vector<Sighting>& goal_sightings,
                                     double resolution_m) {
    require(!goal_sightings.empty(), "goal_directed_target: no goal sightings");
    Vec2 sum;
    for (const Sighting& s : goal_sightings) sum = sum + s.position;
    return cell_of(sum * (1.0 / static_cast<double>(goal_sightings.size())), resolution_m);
}

// Optional revisit penalty: -lambda on cells whose center lies within
// radius_m of any executed pose, 0 elsewhere. Off by default in the harness.
inline ValueField trajectory_penalty(int w, int h, double resolution_m,
                                     const std::vector<Pose>& trajectory, double radius_m,
                                     double lambda) {
    ValueField field(w, h, FieldKind::Trajectory, 0.0);
    const int r = static_cast<int>(std::ceil(radius_m / resolution_m)) + 1;
    for (const Pose& pose : trajectory) {
        const GridCell at = cell_of(pose.position, resolution_m);
        for (int y = at.y - r; y <= at.y + r; ++y) {
            for (int x = at.x - r; x <= at.x + r; ++x) {
                const GridCell c{x, y};
                if (!field.values.in_bounds(c)) continue;
                if (distance(cell_center(c, resolution_m), pose.position) <= radius_m)
                    field.values.at(c) = -lambda;
            }
        }
    }
    return field;
}

// Planner view of an affordance field, for debug dumps.
inline ValueField cost_field(const ValueField& aff, double c_min) {
    ValueField out(aff.values.width(), aff.values.height(), FieldKind::Cost, 0.0);
    for (std::size_t i = 0; i < aff.values.size(); ++i)
        out.values.cells()[i] = std::max(1.0 - aff.values.cells()[i], c_min);
    return out;
}

// Debug dump in the same plain-text graymap format as the belief grid,
// rescaled so the field minimum is black and the maximum white.
inline void write_pgm(const ValueField& field, std::ostream& os) {
    double lo = field.values.cells()[0], hi = lo;
    for (double v : field.values.cells()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    os << "P2\n" << field.values.width() << ' ' << field.values.height() << "\n255\n";
    for (int y = 0; y < field.values.height(); ++y) {
        for (int x = 0; x < field.values.width(); ++x) {
            const int v = static_cast<int>(std::lround((field.values.at(x, y) - lo) / span * 255.0));
            os << v << (x + 1 == field.values.width() ? '\n' : ' ');
        }
    }
}

} // namespace navbench
