#pragma once

#include <cctype>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "navbench/errors.hpp"
#include "navbench/scene.hpp"

namespace navbench {

inline constexpr int kSceneFormatVersion = 1;

namespace detail {

// One grid row as "<count><F|O>" runs, e.g. "3F2O155F".
inline std::string rle_encode_row(const Grid<std::uint8_t>& grid, int y) {
    std::string out;
    int run = 0;
    std::uint8_t value = grid.at(0, y);
    for (int x = 0; x < grid.width(); ++x) {
        if (grid.at(x, y) == value) {
            ++run;
        } else {
            out += std::to_string(run);
            out += value == static_cast<std::uint8_t>(Terrain::Occupied) ? 'O' : 'F';
            value = grid.at(x, y);
            run = 1;
        }
    }
    out += std::to_string(run);
    out += value == static_cast<std::uint8_t>(Terrain::Occupied) ? 'O' : 'F';
    return out;
}

inline void rle_decode_row(const std::string& row, Grid<std::uint8_t>& grid, int y) {
    int x = 0;
    std::size_t i = 0;
    while (i < row.size()) {
        if (!std::isdigit(static_cast<unsigned char>(row[i])))
            throw FormatError("scene grid row: expected run length");
        int run = 0;
        while (i < row.size() && std::isdigit(static_cast<unsigned char>(row[i]))) {
            run = run * 10 + (row[i] - '0');
            ++i;
        }
        if (i == row.size() || (row[i] != 'F' && row[i] != 'O'))
            throw FormatError("scene grid row: expected F or O after run length");
        const std::uint8_t value = row[i] == 'O' ? static_cast<std::uint8_t>(Terrain::Occupied)
                                                 : static_cast<std::uint8_t>(Terrain::Free);
        ++i;
        if (x + run > grid.width()) throw FormatError("scene grid row: run overflows width");
        for (int k = 0; k < run; ++k) grid.at(x++, y) = value;
    }
    if (x != grid.width()) throw FormatError("scene grid row: runs do not fill the width");
}

} // namespace detail

inline nlohmann::json scene_to_json(const Scene& scene) {
    nlohmann::json doc;
    doc["version"] = kSceneFormatVersion;
    doc["id"] = scene.id;
    doc["resolution_m"] = scene.resolution_m;
    doc["grid"]["width"] = scene.grid.width();
    doc["grid"]["height"] = scene.grid.height();
    nlohmann::json rows = nlohmann::json::array();
    for (int y = 0; y < scene.grid.height(); ++y)
        rows.push_back(detail::rle_encode_row(scene.grid, y));
    doc["grid"]["rows"] = std::move(rows);
    nlohmann::json objects = nlohmann::json::array();
    for (const ObjectInstance& obj : scene.objects) {
        objects.push_back({{"category", obj.category}, {"x", obj.anchor.x}, {"y", obj.anchor.y}});
    }
    doc["objects"] = std::move(objects);
    doc["start"] = {{"x", scene.start_pose.position.x},
                    {"y", scene.start_pose.position.y},
                    {"heading_deg", scene.start_pose.heading_deg}};
    doc["goal_category"] = scene.goal_category;
    return doc;
}

inline Scene scene_from_json(const nlohmann::json& doc) {
    try {
        const int version = doc.at("version").get<int>();
        if (version != kSceneFormatVersion)
            throw FormatError("scene file: unsupported version " + std::to_string(version));

        Scene scene;
        scene.id = doc.at("id").get<std::string>();
        scene.resolution_m = doc.at("resolution_m").get<double>();
        if (!(scene.resolution_m > 0.0)) throw FormatError("scene file: bad resolution");
        const int w = doc.at("grid").at("width").get<int>();
        const int h = doc.at("grid").at("height").get<int>();
        if (w <= 0 || h <= 0) throw FormatError("scene file: bad grid size");
        const auto& rows = doc.at("grid").at("rows");
        if (static_cast<int>(rows.size()) != h)
            throw FormatError("scene file: row count does not match height");
        scene.grid = Grid<std::uint8_t>(w, h, static_cast<std::uint8_t>(Terrain::Free));
        for (int y = 0; y < h; ++y)
            detail::rle_decode_row(rows.at(static_cast<std::size_t>(y)).get<std::string>(),
                                   scene.grid, y);

        for (const auto& entry : doc.at("objects")) {
            ObjectInstance obj;
            obj.category = entry.at("category").get<std::string>();
            obj.anchor = Vec2{entry.at("x").get<double>(), entry.at("y").get<double>()};
            const GridCell cell = cell_of(obj.anchor, scene.resolution_m);
            if (!scene.grid.in_bounds(cell))
                throw FormatError("scene file: object anchor out of bounds");
            obj.footprint = {cell};
            scene.objects.push_back(std::move(obj));
        }
        scene.start_pose.position = Vec2{doc.at("start").at("x").get<double>(),
                                         doc.at("start").at("y").get<double>()};
        scene.start_pose.heading_deg = doc.at("start").at("heading_deg").get<int>();
        scene.goal_category = doc.at("goal_category").get<std::string>();

        if (scene.start_pose.heading_deg % kTurnDeg != 0 || scene.start_pose.heading_deg < 0 ||
            scene.start_pose.heading_deg >= 360)
            throw FormatError("scene file: start heading not a multiple of 30 in [0,360)");
        if (!scene.free_cell(cell_of(scene.start_pose.position, scene.resolution_m)))
            throw FormatError("scene file: start cell not free");
        bool goal_found = false;
        for (const ObjectInstance& obj : scene.objects)
            goal_found = goal_found || obj.category == scene.goal_category;
        if (!goal_found) throw FormatError("scene file: no instance of the goal category");
        return scene;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("scene file: ") + e.what());
    }
}

inline void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << scene_to_json(scene).dump(2) << '\n';
}

inline Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open scene file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("scene file " + path + ": " + e.what());
    }
    return scene_from_json(doc);
}

} // namespace navbench
