#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <navbench.hpp>

namespace navbench::cli {

inline std::vector<SelectorMode> parse_modes(const std::string& csv) {
    std::vector<SelectorMode> modes;
    std::string token;
    std::stringstream ss(csv);
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        const SelectorMode m = selector_mode_from_string(token);
        require(m != SelectorMode::GoalDirected,
                "goal_directed is an internal phase, not a runnable mode");
        modes.push_back(m);
    }
    require(!modes.empty(), "no modes given");
    return modes;
}

// Scene files are loaded in filename order, so a directory always yields the
// same suite.
inline std::vector<Scene> load_scene_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path& p = entry.path();
        if (p.extension() == ".json" && p.filename().string().rfind("scene_", 0) == 0) {
            paths.push_back(p);
        }
    }
    if (paths.empty()) throw FormatError("no scene_*.json files in " + dir);
    std::sort(paths.begin(), paths.end());
    std::vector<Scene> scenes;
    scenes.reserve(paths.size());
    for (const fs::path& p : paths) scenes.push_back(load_scene(p.string()));
    return scenes;
}

inline OracleFactory make_oracle_factory(const RunConfig& cfg) {
    if (cfg.oracle == "llm") {
        return [llm = cfg.llm](const EpisodeSpec&) -> std::unique_ptr<VoteOracle> {
            return std::make_unique<LlmVoteOracle>(llm);
        };
    }
    return stub_oracle_factory(default_cooccurrence_table());
}

inline int cmd_gen_scenes(std::uint64_t seed, int count, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
        Scene scene = generate_scene(derive_seed(seed, static_cast<std::uint64_t>(i)));
        char name[32];
        std::snprintf(name, sizeof name, "scene_%03d", i);
        scene.id = name;
        save_scene(scene, out_dir + "/" + name + ".json");
    }
    std::cout << "wrote " << count << " scenes to " << out_dir << "\n";
    return 0;
}

inline int cmd_run(const std::string& scenes_dir, const std::string& modes_csv, int episodes,
                   std::uint64_t seed, int jobs, const std::string& out_path,
                   const std::string& config_path, const std::string& dump_dir) {
    const RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    const std::vector<Scene> scenes = load_scene_dir(scenes_dir);
    const std::vector<SelectorMode> modes = parse_modes(modes_csv);
    const std::vector<EpisodeSpec> specs =
        make_suite_specs(static_cast<int>(scenes.size()), modes, seed, episodes);
    const OracleFactory factory = make_oracle_factory(cfg);

    if (!dump_dir.empty()) {
        // Inspection artifacts for the first spec only; the suite below runs
        // every spec without dumping.
        std::filesystem::create_directories(dump_dir);
        const EpisodeSpec& spec = specs.front();
        EpisodeOptions opt;
        opt.seed = spec.seed;
        opt.episode_idx = spec.episode_idx;
        opt.dump_dir = dump_dir;
        if (spec.episode_idx > 0)
            opt.start = draw_start(scenes[static_cast<std::size_t>(spec.scene_idx)], spec.seed);
        std::unique_ptr<VoteOracle> oracle;
        if (spec.mode == SelectorMode::Shf) {
            oracle = factory(spec);
            opt.oracle = oracle.get();
        }
        run_episode(scenes[static_cast<std::size_t>(spec.scene_idx)], spec.mode, cfg, opt);
    }

    const SuiteReport report = run_suite(scenes, specs, cfg, jobs, factory);
    save_report(report, out_path);
    std::cout << to_markdown(report);
    int aborted = 0;
    for (const ModeAggregate& a : report.aggregates) aborted += a.aborted;
    if (aborted > 0) std::cerr << "warning: " << aborted << " episodes aborted\n";
    return 0;
}

inline int cmd_report(const std::string& in_path, const std::string& format,
                      const std::string& out_path) {
    const SuiteReport report = load_report(in_path);
    std::string text;
    if (format == "csv") {
        std::ostringstream os;
        write_csv(report, os);
        text = os.str();
    } else if (format == "md") {
        text = to_markdown(report);
    } else {
        throw FormatError("unknown report format: " + format);
    }
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw FormatError("cannot open for writing: " + out_path);
        out << text;
    }
    return 0;
}

// Episode selector: either a row index, or scene_id:episode:mode.
inline const EpisodeResult& find_row(const SuiteReport& report, const std::string& id) {
    if (id.find(':') == std::string::npos) {
        const std::size_t idx = static_cast<std::size_t>(std::stoul(id));
        if (idx >= report.rows.size()) throw FormatError("episode index out of range: " + id);
        return report.rows[idx];
    }
    const std::size_t p1 = id.find(':');
    const std::size_t p2 = id.find(':', p1 + 1);
    if (p2 == std::string::npos)
        throw FormatError("episode id must be INDEX or scene_id:episode:mode");
    const std::string scene_id = id.substr(0, p1);
    const int episode = std::stoi(id.substr(p1 + 1, p2 - p1 - 1));
    const SelectorMode mode = selector_mode_from_string(id.substr(p2 + 1));
    for (const EpisodeResult& r : report.rows) {
        if (r.scene_id == scene_id && r.episode_idx == episode && r.mode == mode) return r;
    }
    throw FormatError("no such episode in report: " + id);
}

inline int cmd_render(const std::string& scenes_dir, const std::string& in_path,
                      const std::string& episode_id, const std::string& out_path,
                      const std::string& config_path) {
    const RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    const SuiteReport report = load_report(in_path);
    EpisodeResult row = find_row(report, episode_id);

    const std::vector<Scene> scenes = load_scene_dir(scenes_dir);
    const Scene* scene = nullptr;
    for (const Scene& s : scenes) {
        if (s.id == row.scene_id) {
            scene = &s;
            break;
        }
    }
    if (!scene) throw FormatError("scene " + row.scene_id + " not found in " + scenes_dir);

    row.trajectory = replay_trajectory(*scene, row.start, row.actions);
    std::ofstream out(out_path);
    if (!out) throw FormatError("cannot open for writing: " + out_path);
    out << render_svg(row, *scene, cfg);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"frontier exploration benchmark"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    int count = 10;
    std::string out_dir = "scenes";
    auto* gen = app.add_subcommand("gen-scenes", "generate a scene dataset");
    gen->add_option("--seed", seed, "base seed");
    gen->add_option("--count", count, "number of scenes");
    gen->add_option("--out", out_dir, "output directory")->required();

    std::string scenes_dir;
    std::string modes_csv = "dwfe";
    int episodes = 1;
    int jobs = 1;
    std::string report_path = "report.jsonl";
    std::string config_path;
    std::string dump_dir;
    auto* run = app.add_subcommand("run", "run an episode suite");
    run->add_option("--scenes", scenes_dir, "scene directory")->required();
    run->add_option("--mode", modes_csv,
                    "comma-separated modes: dwfe, shf, nearest, random");
    run->add_option("--episodes", episodes, "episodes per mode, spread over scenes");
    run->add_option("--seed", seed, "suite seed");
    run->add_option("--jobs", jobs, "worker threads");
    run->add_option("--out", report_path, "report output path");
    run->add_option("--config", config_path, "config JSON path");
    run->add_option("--dump-fields", dump_dir, "dump value-map PGMs for the first episode");

    std::string in_path;
    std::string format = "md";
    std::string report_out;
    auto* rep = app.add_subcommand("report", "export a report as a table");
    rep->add_option("--in", in_path, "report JSONL path")->required();
    rep->add_option("--format", format, "csv or md");
    rep->add_option("--out", report_out, "output path (default stdout)");

    std::string episode_id;
    std::string svg_path = "traj.svg";
    auto* ren = app.add_subcommand("render", "render one episode trajectory as SVG");
    ren->add_option("--scenes", scenes_dir, "scene directory")->required();
    ren->add_option("--in", in_path, "report JSONL path")->required();
    ren->add_option("--episode", episode_id, "row index or scene_id:episode:mode")->required();
    ren->add_option("--out", svg_path, "SVG output path");
    ren->add_option("--config", config_path, "config JSON path");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen_scenes(seed, count, out_dir);
        if (run->parsed())
            return cmd_run(scenes_dir, modes_csv, episodes, seed, jobs, report_path, config_path,
                           dump_dir);
        if (rep->parsed()) return cmd_report(in_path, format, report_out);
        if (ren->parsed()) return cmd_render(scenes_dir, in_path, episode_id, svg_path,
                                             config_path);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace navbench::cli
