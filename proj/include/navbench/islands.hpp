#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "navbench/errors.hpp"
#include "navbench/geometry.hpp"

namespace navbench {

struct Sighting {
    std::string category;
    Vec2 position; // estimated world position, meters
};

// A cluster of frontier cells treated as one exploration unit.
struct FrontierIsland {
    int id = 0;                        // stable within one step
    std::vector<GridCell> cells;       // nonempty, row-major sorted
    Vec2 centroid;                     // mean of member cell centers, meters
    std::vector<std::string> names;    // nearby sighted categories, sorted, deduped
};

namespace detail {

// eps-bucketed point index over cell centers.
class NeighborIndex {
public:
    NeighborIndex(const std::vector<Vec2>& pts, double eps) : pts_(pts), eps_(eps) {
        buckets_.reserve(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            buckets_[key(pts[i])].push_back(i);
        }
    }

    // Indices within eps (inclusive), self included; ascending order.
    std::vector<std::size_t> neighbors(std::size_t i) const {
        std::vector<std::size_t> out;
        const Vec2& p = pts_[i];
        const std::int64_t bx = bucket_coord(p.x);
        const std::int64_t by = bucket_coord(p.y);
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                auto it = buckets_.find(pack(bx + dx, by + dy));
                if (it == buckets_.end()) continue;
                for (std::size_t j : it->second) {
                    if (distance(p, pts_[j]) <= eps_) out.push_back(j);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::int64_t bucket_coord(double v) const {
        return static_cast<std::int64_t>(std::floor(v / eps_));
    }
    std::uint64_t pack(std::int64_t x, std::int64_t y) const {
        return (static_cast<std::uint64_t>(x) << 32) ^
               (static_cast<std::uint64_t>(y) & 0xFFFFFFFFULL);
    }
    std::uint64_t key(const Vec2& p) const { return pack(bucket_coord(p.x), bucket_coord(p.y)); }

    const std::vector<Vec2>& pts_;
    double eps_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

} // namespace detail

// DBSCAN over frontier cell centers. With min_samples=1 every point is a core
// point and the result is exactly the connected components of the
// eps-neighbourhood graph: no noise, islands partition the input. For
// min_samples>1 unreached non-core points are dropped as noise. Island ids
// are assigned in ascending order of each island's lexicographically smallest
// cell.
inline std::vector<FrontierIsland> cluster(const std::vector<GridCell>& frontiers,
                                           double eps_m, int min_samples,
                                           double resolution_m) {
    require(eps_m > 0.0, "cluster: eps must be positive");
    require(min_samples >= 1, "cluster: min_samples must be >= 1");
    if (frontiers.empty()) return {};

    std::vector<GridCell> cells = frontiers;
    std::sort(cells.begin(), cells.end(), cell_lex_less);

    std::vector<Vec2> pts;
    pts.reserve(cells.size());
    for (const GridCell& c : cells) pts.push_back(cell_center(c, resolution_m));

    detail::NeighborIndex index(pts, eps_m);
    const std::size_t n = pts.size();

    std::vector<std::vector<std::size_t>> nbrs(n);
    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        nbrs[i] = index.neighbors(i);
        core[i] = nbrs[i].size() >= static_cast<std::size_t>(min_samples);
    }

    constexpr int kUnlabeled = -1;
    std::vector<int> label(n, kUnlabeled);
    int next_label = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != kUnlabeled || !core[i]) continue;
        // Expand a new cluster from this core point.
        label[i] = next_label;
        std::vector<std::size_t> queue{i};
        while (!queue.empty()) {
            const std::size_t p = queue.back();
            queue.pop_back();
            for (std::size_t q : nbrs[p]) {
                if (label[q] != kUnlabeled) continue;
                label[q] = next_label;
                if (core[q]) queue.push_back(q);
            }
        }
        ++next_label;
    }

    std::vector<FrontierIsland> islands(static_cast<std::size_t>(next_label));
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] == kUnlabeled) continue; // noise (min_samples > 1 only)
        islands[static_cast<std::size_t>(label[i])].cells.push_back(cells[i]);
    }
    islands.erase(std::remove_if(islands.begin(), islands.end(),
                                 [](const FrontierIsland& f) { return f.cells.empty(); }),
                  islands.end());

    // Deterministic ids: ascending by smallest member cell. Members are already
    // lexicographically sorted because the input was.
    std::sort(islands.begin(), islands.end(),
              [](const FrontierIsland& a, const FrontierIsland& b) {
                  return cell_lex_less(a.cells.front(), b.cells.front());
              });
    for (std::size_t k = 0; k < islands.size(); ++k) {
        FrontierIsland& f = islands[k];
        f.id = static_cast<int>(k);
        Vec2 sum;
        for (const GridCell& c : f.cells) sum = sum + cell_center(c, resolution_m);
        f.centroid = sum * (1.0 / static_cast<double>(f.cells.size()));
    }
    return islands;
}

// Attaches the categories of sightings lying within `radius_m` of any member
// cell, deduplicated and sorted. Distances are intentionally not kept.
inline void attach_names(std::vector<FrontierIsland>& islands,
                         const std::vector<Sighting>& sightings, double radius_m,
                         double resolution_m) {
    for (FrontierIsland& f : islands) {
        f.names.clear();
        for (const Sighting& s : sightings) {
            bool near = false;
            for (const GridCell& c : f.cells) {
                if (distance(cell_center(c, resolution_m), s.position) <= radius_m) {
                    near = true;
                    break;
                }
            }
            if (near) f.names.push_back(s.category);
        }
        std::sort(f.names.begin(), f.names.end());
        f.names.erase(std::unique(f.names.begin(), f.names.end()), f.names.end());
    }
}

} // namespace navbench
