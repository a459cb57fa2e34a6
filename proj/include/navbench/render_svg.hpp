#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "navbench/config.hpp"
#include "navbench/episode.hpp"
#include "navbench/islands.hpp"
#include "navbench/mapping.hpp"
#include "navbench/scene.hpp"

namespace navbench {

// Rebuilds the pose sequence of a finished episode from its start pose and
// action string. Stepping is deterministic, so this reproduces the exact
// trajectory of the original run.
inline std::vector<Pose> replay_trajectory(const Scene& scene, const Pose& start,
                                           const std::string& actions) {
    std::vector<Pose> out;
    out.reserve(actions.size() + 1);
    Pose pose = start;
    out.push_back(pose);
    for (char c : actions) {
        pose = step(scene, pose, action_from_char(c));
        out.push_back(pose);
    }
    return out;
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline void svg_num(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    out += buf;
}

} // namespace detail

// Renders one episode as a standalone SVG: walls dark, still-unknown belief
// cells light gray, the trajectory as a blue polyline, goal objects as purple
// squares, the final step's frontier cells as small red dots and island
// centroids as yellow dots. Start is a green circle, the final pose a blue
// heading triangle. World y points up, SVG y points down, hence the flip.
inline std::string render_svg(const EpisodeResult& result, const Scene& scene,
                              const RunConfig& cfg = {}) {
    require(!result.trajectory.empty(), "render_svg: trajectory is empty");

    const int w = scene.grid.width();
    const int h = scene.grid.height();
    const double res = scene.resolution_m;
    const double s = 6.0; // pixels per cell
    const double width_px = w * s;
    const double height_px = h * s;

    // Final belief map, replayed from the trajectory poses.
    OccupancyGrid belief(w, h, res);
    for (const Pose& pose : result.trajectory) {
        integrate(belief, pose, sense(scene, pose, cfg.sensor));
    }
    const std::vector<GridCell> frontier_cells = extract_frontiers(belief);
    const std::vector<FrontierIsland> islands =
        cluster(frontier_cells, cfg.cluster_eps_m, cfg.cluster_min_samples, res);

    const auto px = [&](const Vec2& p) { return p.x / res * s; };
    const auto py = [&](const Vec2& p) { return (h * res - p.y) / res * s; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
    detail::svg_num(svg, width_px);
    svg += "\" height=\"";
    detail::svg_num(svg, height_px);
    svg += "\" viewBox=\"0 0 ";
    detail::svg_num(svg, width_px);
    svg += " ";
    detail::svg_num(svg, height_px);
    svg += "\">\n";
    svg += "<title>" + detail::xml_escape(scene.id + " / " + selector_mode_name(result.mode)) +
           "</title>\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    // Cell layers as horizontal run-merged rects: one pass for unknown belief,
    // one for walls.
    const auto emit_runs = [&](const char* fill, auto&& pred) {
        for (int cy = 0; cy < h; ++cy) {
            int cx = 0;
            while (cx < w) {
                if (!pred(cx, cy)) {
                    ++cx;
                    continue;
                }
                int run = cx;
                while (run < w && pred(run, cy)) ++run;
                svg += "<rect x=\"";
                detail::svg_num(svg, cx * s);
                svg += "\" y=\"";
                detail::svg_num(svg, (h - 1 - cy) * s);
                svg += "\" width=\"";
                detail::svg_num(svg, (run - cx) * s);
                svg += "\" height=\"";
                detail::svg_num(svg, s);
                svg += "\" fill=\"";
                svg += fill;
                svg += "\"/>\n";
                cx = run;
            }
        }
    };
    emit_runs("#d9d9d9", [&](int x, int y) {
        return belief.at(GridCell{x, y}) == BeliefCell::Unknown && !scene.occupied(GridCell{x, y});
    });
    emit_runs("#30302e", [&](int x, int y) { return scene.occupied(GridCell{x, y}); });

    // Trajectory polyline, one point per pose.
    svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"";
    detail::svg_num(svg, 0.4 * s);
    svg += "\" stroke-linejoin=\"round\" stroke-linecap=\"round\" points=\"";
    for (std::size_t i = 0; i < result.trajectory.size(); ++i) {
        if (i) svg += " ";
        detail::svg_num(svg, px(result.trajectory[i].position));
        svg += ",";
        detail::svg_num(svg, py(result.trajectory[i].position));
    }
    svg += "\"/>\n";

    // Goal objects: purple squares centered on each anchor.
    const double goal_half = 1.5 * s;
    for (const ObjectInstance& obj : scene.objects) {
        if (obj.category != scene.goal_category) continue;
        svg += "<rect x=\"";
        detail::svg_num(svg, px(obj.anchor) - goal_half);
        svg += "\" y=\"";
        detail::svg_num(svg, py(obj.anchor) - goal_half);
        svg += "\" width=\"";
        detail::svg_num(svg, 2 * goal_half);
        svg += "\" height=\"";
        detail::svg_num(svg, 2 * goal_half);
        svg += "\" fill=\"#9467bd\"/>\n";
    }

    // Final-step frontiers: small red dots at cell centers.
    for (const GridCell& c : frontier_cells) {
        const Vec2 p = cell_center(c, res);
        svg += "<circle cx=\"";
        detail::svg_num(svg, px(p));
        svg += "\" cy=\"";
        detail::svg_num(svg, py(p));
        svg += "\" r=\"";
        detail::svg_num(svg, 0.35 * s);
        svg += "\" fill=\"#d62728\"/>\n";
    }

    // Island centroids: yellow dots, outlined so they read on light floor.
    for (const FrontierIsland& isl : islands) {
        svg += "<circle cx=\"";
        detail::svg_num(svg, px(isl.centroid));
        svg += "\" cy=\"";
        detail::svg_num(svg, py(isl.centroid));
        svg += "\" r=\"";
        detail::svg_num(svg, 0.9 * s);
        svg += "\" fill=\"#ffd400\" stroke=\"#7a6a00\" stroke-width=\"1\"/>\n";
    }

    // Start marker: green circle.
    {
        const Pose& p0 = result.trajectory.front();
        svg += "<circle cx=\"";
        detail::svg_num(svg, px(p0.position));
        svg += "\" cy=\"";
        detail::svg_num(svg, py(p0.position));
        svg += "\" r=\"";
        detail::svg_num(svg, 1.0 * s);
        svg += "\" fill=\"#2ca02c\"/>\n";
    }

    // Final pose: heading triangle.
    {
        const Pose& pe = result.trajectory.back();
        const double a = pe.heading_deg * kPi / 180.0;
        const Vec2 tip{pe.position.x + 0.18 * std::cos(a), pe.position.y + 0.18 * std::sin(a)};
        const Vec2 left{pe.position.x + 0.10 * std::cos(a + 2.5),
                        pe.position.y + 0.10 * std::sin(a + 2.5)};
        const Vec2 right{pe.position.x + 0.10 * std::cos(a - 2.5),
                         pe.position.y + 0.10 * std::sin(a - 2.5)};
        svg += "<polygon fill=\"#17357a\" points=\"";
        detail::svg_num(svg, px(tip));
        svg += ",";
        detail::svg_num(svg, py(tip));
        svg += " ";
        detail::svg_num(svg, px(left));
        svg += ",";
        detail::svg_num(svg, py(left));
        svg += " ";
        detail::svg_num(svg, px(right));
        svg += ",";
        detail::svg_num(svg, py(right));
        svg += "\"/>\n";
    }

    svg += "</svg>\n";
    return svg;
}

} // namespace navbench
