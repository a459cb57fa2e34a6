#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "navbench/episode.hpp"
#include "navbench/errors.hpp"

namespace navbench {

// Success weighted by path length, as a percentage: mean of
// S_i * l*_i / max(l*_i, l_i). A zero-length optimum with success counts as a
// full term.
inline double compute_spl(const std::vector<EpisodeResult>& results) {
    require(!results.empty(), "compute_spl: no episodes");
    double sum = 0.0;
    for (const EpisodeResult& r : results) {
        if (!r.success) continue;
        sum += r.shortest_m == 0.0
                   ? 1.0
                   : r.shortest_m / std::max(r.shortest_m, r.path_length_m);
    }
    return sum / static_cast<double>(results.size()) * 100.0;
}

inline double success_percent(const std::vector<EpisodeResult>& results) {
    require(!results.empty(), "success_percent: no episodes");
    double n = 0.0;
    for (const EpisodeResult& r : results) n += r.success ? 1.0 : 0.0;
    return n / static_cast<double>(results.size()) * 100.0;
}

inline double average_steps(const std::vector<EpisodeResult>& results) {
    require(!results.empty(), "average_steps: no episodes");
    double n = 0.0;
    for (const EpisodeResult& r : results) n += r.steps;
    return n / static_cast<double>(results.size());
}

struct ModeAggregate {
    std::string mode;
    int episodes = 0;
    int successes = 0;
    int aborted = 0;
    double success_pct = 0.0;
    double spl_pct = 0.0;
    double avg_steps = 0.0;
};

// Per-mode aggregates, ordered by mode name.
inline std::vector<ModeAggregate> aggregate_by_mode(const std::vector<EpisodeResult>& results) {
    std::map<std::string, std::vector<EpisodeResult>> by_mode;
    for (const EpisodeResult& r : results) by_mode[selector_mode_name(r.mode)].push_back(r);

    std::vector<ModeAggregate> out;
    for (const auto& [mode, rows] : by_mode) {
        ModeAggregate agg;
        agg.mode = mode;
        agg.episodes = static_cast<int>(rows.size());
        for (const EpisodeResult& r : rows) {
            agg.successes += r.success ? 1 : 0;
            agg.aborted += r.aborted ? 1 : 0;
        }
        agg.success_pct = success_percent(rows);
        agg.spl_pct = compute_spl(rows);
        agg.avg_steps = average_steps(rows);
        out.push_back(std::move(agg));
    }
    return out;
}

} // namespace navbench
