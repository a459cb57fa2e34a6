#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "navbench/errors.hpp"
#include "navbench/metrics.hpp"
#include "navbench/suite.hpp"

namespace navbench {

inline nlohmann::json episode_to_json(const EpisodeResult& r) {
    nlohmann::json row = {
        {"type", "episode"},
        {"scene_id", r.scene_id},
        {"episode", r.episode_idx},
        {"mode", selector_mode_name(r.mode)},
        {"seed", r.seed},
        {"success", r.success},
        {"aborted", r.aborted},
        {"steps", r.steps},
        {"path_length_m", r.path_length_m},
        {"shortest_m", r.shortest_m},
        {"abstentions", r.abstentions},
        {"vote_fallbacks", r.vote_fallbacks},
        {"start",
         {{"x", r.start.position.x},
          {"y", r.start.position.y},
          {"heading_deg", r.start.heading_deg}}},
        {"actions", r.actions},
    };
    if (!r.error.empty()) row["error"] = r.error;
    return row;
}

inline EpisodeResult episode_from_json(const nlohmann::json& row) {
    EpisodeResult r;
    r.scene_id = row.at("scene_id").get<std::string>();
    r.episode_idx = row.at("episode").get<int>();
    r.mode = selector_mode_from_string(row.at("mode").get<std::string>());
    r.seed = row.at("seed").get<std::uint64_t>();
    r.success = row.at("success").get<bool>();
    r.aborted = row.at("aborted").get<bool>();
    r.steps = row.at("steps").get<int>();
    r.path_length_m = row.at("path_length_m").get<double>();
    r.shortest_m = row.at("shortest_m").get<double>();
    r.abstentions = row.at("abstentions").get<int>();
    r.vote_fallbacks = row.at("vote_fallbacks").get<int>();
    r.start.position = Vec2{row.at("start").at("x").get<double>(),
                            row.at("start").at("y").get<double>()};
    r.start.heading_deg = row.at("start").at("heading_deg").get<int>();
    r.actions = row.at("actions").get<std::string>();
    if (row.contains("error")) r.error = row.at("error").get<std::string>();
    return r;
}

// Line-delimited JSON: one row per episode, then one summary line. Contains
// no timestamps or absolute paths, so identical runs serialize to identical
// bytes.
inline void write_report(const SuiteReport& report, std::ostream& os) {
    for (const EpisodeResult& r : report.rows) os << episode_to_json(r).dump() << '\n';
    nlohmann::json modes = nlohmann::json::array();
    for (const ModeAggregate& a : report.aggregates) {
        modes.push_back({{"mode", a.mode},
                         {"episodes", a.episodes},
                         {"successes", a.successes},
                         {"aborted", a.aborted},
                         {"success_pct", a.success_pct},
                         {"spl_pct", a.spl_pct},
                         {"avg_steps", a.avg_steps}});
    }
    const nlohmann::json summary = {{"type", "summary"},
                                    {"tool", report.tool},
                                    {"version", report.version},
                                    {"config", report.config_fingerprint},
                                    {"modes", modes}};
    os << summary.dump() << '\n';
}

inline void save_report(const SuiteReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    write_report(report, out);
}

// Parses a report and re-derives every aggregate from the rows; a summary
// that does not match its own rows is rejected.
inline SuiteReport load_report(std::istream& is) {
    SuiteReport report;
    bool summary_seen = false;
    std::vector<ModeAggregate> stated;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(line);
            const std::string type = row.at("type").get<std::string>();
            if (type == "episode") {
                if (summary_seen) throw FormatError("report: episode row after summary");
                report.rows.push_back(episode_from_json(row));
            } else if (type == "summary") {
                if (summary_seen) throw FormatError("report: repeated summary");
                summary_seen = true;
                report.tool = row.at("tool").get<std::string>();
                report.version = row.at("version").get<std::string>();
                report.config_fingerprint = row.at("config").get<std::string>();
                for (const auto& m : row.at("modes")) {
                    ModeAggregate a;
                    a.mode = m.at("mode").get<std::string>();
                    a.episodes = m.at("episodes").get<int>();
                    a.successes = m.at("successes").get<int>();
                    a.aborted = m.at("aborted").get<int>();
                    a.success_pct = m.at("success_pct").get<double>();
                    a.spl_pct = m.at("spl_pct").get<double>();
                    a.avg_steps = m.at("avg_steps").get<double>();
                    stated.push_back(std::move(a));
                }
            } else {
                throw FormatError("report: unknown row type \"" + type + "\"");
            }
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("report line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!summary_seen) throw FormatError("report: missing summary line");
    if (report.rows.empty()) throw FormatError("report: no episode rows");

    report.aggregates = aggregate_by_mode(report.rows);
    if (report.aggregates.size() != stated.size())
        throw FormatError("report: summary modes do not match the rows");
    for (std::size_t i = 0; i < stated.size(); ++i) {
        const ModeAggregate& a = report.aggregates[i];
        const ModeAggregate& b = stated[i];
        const bool same = a.mode == b.mode && a.episodes == b.episodes &&
                          a.successes == b.successes && a.aborted == b.aborted &&
                          std::abs(a.success_pct - b.success_pct) < 1e-9 &&
                          std::abs(a.spl_pct - b.spl_pct) < 1e-9 &&
                          std::abs(a.avg_steps - b.avg_steps) < 1e-9;
        if (!same)
            throw FormatError("report: summary aggregates for mode \"" + b.mode +
                              "\" do not recompute from the rows");
    }
    return report;
}

inline SuiteReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open report file: " + path);
    return load_report(in);
}

inline void write_csv(const SuiteReport& report, std::ostream& os) {
    os << "scene_id,episode,mode,seed,success,steps,path_length_m,shortest_m,"
          "abstentions,vote_fallbacks,aborted\n";
    char buf[64];
    for (const EpisodeResult& r : report.rows) {
        os << r.scene_id << ',' << r.episode_idx << ',' << selector_mode_name(r.mode) << ','
           << r.seed << ',' << (r.success ? 1 : 0) << ',' << r.steps << ',';
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.path_length_m, r.shortest_m);
        os << buf << ',' << r.abstentions << ',' << r.vote_fallbacks << ','
           << (r.aborted ? 1 : 0) << '\n';
    }
}

inline std::string to_markdown(const SuiteReport& report) {
    std::string md = "| mode | episodes | success % | SPL % | avg steps | aborted |\n"
                     "|---|---|---|---|---|---|\n";
    char buf[128];
    for (const ModeAggregate& a : report.aggregates) {
        std::snprintf(buf, sizeof buf, "| %s | %d | %.2f | %.2f | %.1f | %d |\n", a.mode.c_str(),
                      a.episodes, a.success_pct, a.spl_pct, a.avg_steps, a.aborted);
        md += buf;
    }
    return md;
}

} // namespace navbench
