#pragma once

#include <string>
#include <vector>

#include "navbench/errors.hpp"
#include "navbench/geometry.hpp"
#include "navbench/grid.hpp"

namespace navbench {

enum class Terrain : std::uint8_t { Free = 0, Occupied = 1 };

struct ObjectInstance {
    std::string category;
    Vec2 anchor;                      // continuous world position, meters
    std::vector<GridCell> footprint;  // nonempty; anchor cell by default
};

// Headings are quantized to multiples of 30 degrees.
inline constexpr int kTurnDeg = 30;
inline constexpr double kForwardStepM = 0.20;

struct Pose {
    Vec2 position;
    int heading_deg = 0; // in {0, 30, ..., 330}

    bool operator==(const Pose& o) const {
        return position == o.position && heading_deg == o.heading_deg;
    }
};

enum class Action : std::uint8_t { Forward, TurnLeft, TurnRight, Stop };

inline char action_char(Action a) {
    switch (a) {
        case Action::Forward: return 'F';
        case Action::TurnLeft: return 'L';
        case Action::TurnRight: return 'R';
        case Action::Stop: return 'S';
    }
    return '?';
}

inline Action action_from_char(char c) {
    switch (c) {
        case 'F': return Action::Forward;
        case 'L': return Action::TurnLeft;
        case 'R': return Action::TurnRight;
        case 'S': return Action::Stop;
    }
    throw ContractViolation("action_from_char: unknown action code");
}

// Ground-truth world. Immutable after generation; shared across episodes.
struct Scene {
    std::string id;
    double resolution_m = 0.05;
    Grid<std::uint8_t> grid; // Terrain values
    std::vector<ObjectInstance> objects;
    Pose start_pose;
    std::string goal_category;

    bool occupied(const GridCell& c) const {
        return grid.in_bounds(c) && grid.at(c) == static_cast<std::uint8_t>(Terrain::Occupied);
    }
    bool free_cell(const GridCell& c) const {
        return grid.in_bounds(c) && grid.at(c) == static_cast<std::uint8_t>(Terrain::Free);
    }
};

struct DepthRay {
    double angle_deg = 0.0; // relative to heading
    double range_m = 0.0;
    bool hit = false;
};

struct ObjectSighting {
    std::string category;
    double range_m = 0.0;
    double bearing_deg = 0.0; // relative to heading
};

struct Observation {
    std::vector<DepthRay> depth;
    std::vector<ObjectSighting> visible_objects;
};

struct SensorConfig {
    double fov_deg = 90.0;
    int n_rays = 120;
    double max_range_m = 5.0;
};

inline constexpr double kSuccessRadiusM = 0.25;

// Applies one discrete action. Forward advances 0.20 m along the heading; if
// the swept segment crosses any occupied cell the move is a no-op. Turns
// rotate +-30 degrees; stop leaves the pose unchanged.
inline Pose step(const Scene& scene, const Pose& pose, Action action) {
    switch (action) {
        case Action::TurnLeft: {
            Pose p = pose;
            p.heading_deg = (pose.heading_deg + kTurnDeg) % 360;
            return p;
        }
        case Action::TurnRight: {
            Pose p = pose;
            p.heading_deg = (pose.heading_deg - kTurnDeg + 360) % 360;
            return p;
        }
        case Action::Stop:
            return pose;
        case Action::Forward: {
            const Vec2 dir = heading_dir(pose.heading_deg);
            bool blocked = false;
            march_cells(pose.position, dir, kForwardStepM, scene.resolution_m,
                        [&](const GridCell& c, double) {
                            if (scene.occupied(c) || !scene.grid.in_bounds(c)) {
                                blocked = true;
                                return false;
                            }
                            return true;
                        });
            if (blocked) return pose;
            Pose p = pose;
            p.position = pose.position + dir * kForwardStepM;
            return p;
        }
    }
    return pose;
}

namespace detail {

// First occupied cell along the ray, as (range to cell entry, hit). Cells
// outside the grid are transparent; the walk ends at max_range.
inline DepthRay cast_ray(const Scene& scene, const Vec2& origin, double world_angle_deg,
                         double max_range) {
    DepthRay out;
    out.range_m = max_range;
    out.hit = false;
    const double r = deg_to_rad(world_angle_deg);
    const Vec2 dir{std::cos(r), std::sin(r)};
    march_cells(origin, dir, max_range, scene.resolution_m,
                [&](const GridCell& c, double t) {
                    if (scene.occupied(c)) {
                        out.range_m = t;
                        out.hit = true;
                        return false;
                    }
                    return true;
                });
    return out;
}

// True when no occupied cell lies on the segment between two points.
inline bool segment_clear(const Scene& scene, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len = d.norm();
    if (len == 0.0) return true;
    bool clear = true;
    march_cells(a, d, len, scene.resolution_m, [&](const GridCell& c, double) {
        if (scene.occupied(c)) {
            clear = false;
            return false;
        }
        return true;
    });
    return clear;
}

} // namespace detail

// Casts a planar fan of depth rays over the field of view and reports every
// object anchor with unobstructed line of sight inside the FOV and range.
inline Observation sense(const Scene& scene, const Pose& pose,
                         const SensorConfig& sensor = {}) {
    Observation obs;
    obs.depth.reserve(static_cast<std::size_t>(sensor.n_rays));
    for (int i = 0; i < sensor.n_rays; ++i) {
        double rel = 0.0;
        if (sensor.n_rays > 1) {
            rel = -sensor.fov_deg / 2.0 +
                  sensor.fov_deg * static_cast<double>(i) / (sensor.n_rays - 1);
        }
        DepthRay ray = detail::cast_ray(scene, pose.position,
                                        pose.heading_deg + rel, sensor.max_range_m);
        ray.angle_deg = rel;
        obs.depth.push_back(ray);
    }
    for (const ObjectInstance& obj : scene.objects) {
        const Vec2 to = obj.anchor - pose.position;
        const double range = to.norm();
        if (range > sensor.max_range_m) continue;
        const double bearing =
            wrap_deg(rad_to_deg(std::atan2(to.y, to.x)) - pose.heading_deg);
        if (std::abs(bearing) > sensor.fov_deg / 2.0) continue;
        if (!detail::segment_clear(scene, pose.position, obj.anchor)) continue;
        obs.visible_objects.push_back({obj.category, range, bearing});
    }
    return obs;
}

// Success predicate: some goal-category object visible within the success radius.
inline bool goal_reached(const Scene& scene, const Pose& /*pose*/, const Observation& obs,
                         double success_radius_m = kSuccessRadiusM) {
    for (const ObjectSighting& s : obs.visible_objects) {
        if (s.category == scene.goal_category && s.range_m <= success_radius_m) return true;
    }
    return false;
}

// World position of a sighting, reconstructed from range and bearing.
inline Vec2 sighting_position(const Pose& pose, const ObjectSighting& s) {
    const double r = deg_to_rad(pose.heading_deg + s.bearing_deg);
    return pose.position + Vec2{std::cos(r), std::sin(r)} * s.range_m;
}

} // namespace navbench
