#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "navbench/errors.hpp"
#include "navbench/planner.hpp"
#include "navbench/rng.hpp"
#include "navbench/scene.hpp"
#include "navbench/vocab.hpp"

namespace navbench {

struct SceneParams {
    int width_cells = 120;
    int height_cells = 120;
    double resolution_m = 0.05;
    int rooms_min = 3;
    int rooms_max = 5;
    double corridor_width_m = 1.0;
    double door_width_m = 0.60;
    double wall_thickness_m = 0.10;
    double min_room_span_m = 1.5;
    int objects_per_room = 3;
    int max_attempts = 20;
    double same_room_weight = 0.85;
    double cross_room_weight = 0.08;
    std::vector<RoomType> rooms = room_types();
};

namespace detail {

struct RoomRect {
    int x0, x1, y0, y1; // interior cells, half-open
    int door_cx;        // door center column
    bool above_corridor;
    int type_index;
};

inline void carve(Grid<std::uint8_t>& cells, int x0, int x1, int y0, int y1) {
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            cells.at(x, y) = static_cast<std::uint8_t>(Terrain::Free);
}

// Splits a band into k room interiors separated by walls, carving each room
// and its door through to the corridor.
inline std::vector<RoomRect> carve_band(Grid<std::uint8_t>& cells, Rng& rng, int border,
                                        int width, int y0, int y1, bool above_corridor,
                                        int wall_t, int door_w, int min_span, int k) {
    std::vector<RoomRect> rooms;
    const int span = width - 2 * border;
    int slack = span - k * min_span - (k - 1) * wall_t;
    require(slack >= 0, "carve_band: rooms do not fit the band");
    std::vector<int> widths(static_cast<std::size_t>(k), min_span);
    for (int i = 0; i + 1 < k; ++i) {
        const int extra = rng.int_in(0, slack);
        widths[static_cast<std::size_t>(i)] += extra;
        slack -= extra;
    }
    widths[static_cast<std::size_t>(k - 1)] += slack;

    int x0 = border;
    for (int i = 0; i < k; ++i) {
        const int w = widths[static_cast<std::size_t>(i)];
        carve(cells, x0, x0 + w, y0, y1);
        const int dx0 = rng.int_in(x0 + 2, x0 + w - door_w - 2);
        if (above_corridor) {
            carve(cells, dx0, dx0 + door_w, y1, y1 + wall_t);
        } else {
            carve(cells, dx0, dx0 + door_w, y0 - wall_t, y0);
        }
        rooms.push_back({x0, x0 + w, y0, y1, dx0 + door_w / 2, above_corridor, -1});
        x0 += w + wall_t;
    }
    return rooms;
}

inline ObjectInstance make_object(const std::string& category, GridCell cell, double res) {
    ObjectInstance obj;
    obj.category = category;
    obj.anchor = cell_center(cell, res);
    obj.footprint = {cell};
    return obj;
}

// Random interior cell at least margin cells from the room walls and
// min_sep cells from already placed objects in the scene.
inline bool place_clear_cell(Rng& rng, const RoomRect& room, int margin,
                             const std::vector<ObjectInstance>& placed, double res,
                             int min_sep, GridCell& out) {
    for (int tries = 0; tries < 30; ++tries) {
        const GridCell c{rng.int_in(room.x0 + margin, room.x1 - 1 - margin),
                         rng.int_in(room.y0 + margin, room.y1 - 1 - margin)};
        bool clear = true;
        for (const ObjectInstance& obj : placed) {
            const GridCell oc = cell_of(obj.anchor, res);
            if (std::abs(oc.x - c.x) < min_sep && std::abs(oc.y - c.y) < min_sep) {
                clear = false;
                break;
            }
        }
        if (clear) {
            out = c;
            return true;
        }
    }
    return false;
}

inline bool try_generate(std::uint64_t seed, const SceneParams& p, std::uint64_t attempt,
                         Scene& out) {
    Rng rng(derive_seed(seed, attempt, 0x5ce9e5u));
    const double res = p.resolution_m;
    const int W = p.width_cells, H = p.height_cells;
    const int wall_t = std::max(1, static_cast<int>(std::lround(p.wall_thickness_m / res)));
    const int border = wall_t;
    const int corr_w = static_cast<int>(std::lround(p.corridor_width_m / res));
    const int door_w = static_cast<int>(std::lround(p.door_width_m / res));
    const int min_span = static_cast<int>(std::lround(p.min_room_span_m / res));

    Scene scene;
    scene.id = "scene-" + std::to_string(seed);
    scene.resolution_m = res;
    scene.grid = Grid<std::uint8_t>(W, H, static_cast<std::uint8_t>(Terrain::Occupied));

    const int cy_lo = border + min_span + wall_t;
    const int cy_hi = H - border - min_span - wall_t - corr_w;
    require(cy_lo <= cy_hi, "generate_scene: grid too small for corridor and rooms");
    const int cy0 = rng.int_in(cy_lo, cy_hi);
    const int cy1 = cy0 + corr_w;
    carve(scene.grid, border, W - border, cy0, cy1);

    const int n_rooms = rng.int_in(p.rooms_min, p.rooms_max);
    int n_top = (n_rooms + 1) / 2;
    if (rng.chance(0.5)) n_top = n_rooms - n_top;
    const int n_bot = n_rooms - n_top;

    std::vector<RoomRect> rooms;
    if (n_top > 0) {
        const auto band = carve_band(scene.grid, rng, border, W, border, cy0 - wall_t, true,
                                     wall_t, door_w, min_span, n_top);
        rooms.insert(rooms.end(), band.begin(), band.end());
    }
    if (n_bot > 0) {
        const auto band = carve_band(scene.grid, rng, border, W, cy1 + wall_t, H - border, false,
                                     wall_t, door_w, min_span, n_bot);
        rooms.insert(rooms.end(), band.begin(), band.end());
    }

    std::vector<int> type_order(p.rooms.size());
    for (std::size_t i = 0; i < type_order.size(); ++i) type_order[i] = static_cast<int>(i);
    rng.shuffle(type_order);
    for (std::size_t i = 0; i < rooms.size(); ++i) {
        rooms[i].type_index = i < type_order.size()
                                  ? type_order[i]
                                  : type_order[rng.bounded(type_order.size())];
    }

    const int goal_room = static_cast<int>(rng.bounded(rooms.size()));
    scene.goal_category = rng.pick(p.rooms[static_cast<std::size_t>(
                                              rooms[static_cast<std::size_t>(goal_room)]
                                                  .type_index)]
                                       .objects);

    for (std::size_t ri = 0; ri < rooms.size(); ++ri) {
        const RoomRect& room = rooms[ri];
        const RoomType& type = p.rooms[static_cast<std::size_t>(room.type_index)];
        std::vector<std::string> candidates;
        for (const std::string& cat : type.objects) {
            if (cat != scene.goal_category) candidates.push_back(cat);
        }
        rng.shuffle(candidates);

        int budget = p.objects_per_room;
        if (static_cast<int>(ri) == goal_room) {
            // Goal instance sits deep in its room, far from the door.
            const int depth = (room.y1 - room.y0) / 3;
            GridCell gc;
            const RoomRect deep{room.x0, room.x1,
                                room.above_corridor ? room.y0 : room.y1 - depth,
                                room.above_corridor ? room.y0 + depth : room.y1,
                                room.door_cx, room.above_corridor, room.type_index};
            if (!place_clear_cell(rng, deep, 2, scene.objects, res, 6, gc)) return false;
            scene.objects.push_back(make_object(scene.goal_category, gc, res));
            --budget;
        }
        if (budget > 0 && !candidates.empty()) {
            // Signature object just inside the doorway, visible from the corridor.
            const int sig_y = room.above_corridor ? room.y1 - 3 : room.y0 + 2;
            scene.objects.push_back(
                make_object(candidates.back(), GridCell{room.door_cx, sig_y}, res));
            candidates.pop_back();
            --budget;
        }
        while (budget > 0 && !candidates.empty()) {
            GridCell c;
            if (place_clear_cell(rng, room, 2, scene.objects, res, 6, c)) {
                scene.objects.push_back(make_object(candidates.back(), c, res));
            }
            candidates.pop_back();
            --budget;
        }
    }

    const GridCell start_cell{rng.int_in(border + 4, W - border - 5), cy0 + corr_w / 2};
    scene.start_pose.position = cell_center(start_cell, res);
    scene.start_pose.heading_deg = kTurnDeg * rng.int_in(0, 11);
    out = std::move(scene);
    return true;
}

inline bool scene_valid(const Scene& scene) {
    for (const ObjectInstance& obj : scene.objects) {
        if (!scene.free_cell(cell_of(obj.anchor, scene.resolution_m))) return false;
    }
    const std::vector<GridCell> region = success_region(scene);
    if (region.empty()) return false;
    const GridCell start = cell_of(scene.start_pose.position, scene.resolution_m);
    if (!scene.free_cell(start)) return false;
    const Grid<double> dist =
        geodesic_distances(true_free_mask(scene), start, scene.resolution_m);
    double best = std::numeric_limits<double>::infinity();
    for (const GridCell& c : region) best = std::min(best, dist.at(c));
    return std::isfinite(best) && best >= 1.0;
}

} // namespace detail

// Deterministic procedural scene: a full-width corridor with doored rooms on
// both sides, each furnished from one room type. Exactly one instance of the
// goal category exists, placed deep inside its room, while a same-room
// signature object stands just inside each doorway. Invalid draws retry with
// an attempt-derived seed before failing.
inline Scene generate_scene(std::uint64_t seed, const SceneParams& params = {}) {
    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
        Scene scene;
        if (!detail::try_generate(seed, params, static_cast<std::uint64_t>(attempt), scene))
            continue;
        if (detail::scene_valid(scene)) return scene;
    }
    throw GenerationError("generate_scene: no valid scene for seed " + std::to_string(seed) +
                          " after " + std::to_string(params.max_attempts) + " attempts");
}

} // namespace navbench
