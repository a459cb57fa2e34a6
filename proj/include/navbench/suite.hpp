#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "navbench/config.hpp"
#include "navbench/episode.hpp"
#include "navbench/metrics.hpp"
#include "navbench/planner.hpp"
#include "navbench/rng.hpp"
#include "navbench/version.hpp"

namespace navbench {

struct EpisodeSpec {
    int scene_idx = 0;
    int episode_idx = 0;
    SelectorMode mode = SelectorMode::Dwfe;
    std::uint64_t seed = 0;
};

struct SuiteReport {
    std::string tool = kToolName;
    std::string version = kToolVersion;
    std::string config_fingerprint;
    std::vector<EpisodeResult> rows;
    std::vector<ModeAggregate> aggregates;
};

// Builds one VoteOracle per shf episode; must be safe to call from worker
// threads. The default yields the offline co-occurrence stub.
using OracleFactory = std::function<std::unique_ptr<VoteOracle>(const EpisodeSpec&)>;

inline OracleFactory stub_oracle_factory(CooccurrenceTable table) {
    return [table = std::move(table)](const EpisodeSpec&) {
        return std::make_unique<CooccurrenceStub>(table);
    };
}

// Deterministic alternate start for repeat episodes on one scene: a free cell
// at least 1.5 m (geodesic) from the success region, with a seeded heading.
inline Pose draw_start(const Scene& scene, std::uint64_t seed) {
    constexpr double kMinStartGoalM = 1.5;
    Rng rng(derive_seed(seed, 0x57a57ULL));
    const Grid<double> from_goal = geodesic_distances(
        true_free_mask(scene), success_region(scene), scene.resolution_m);

    std::vector<GridCell> candidates;
    for (int y = 0; y < scene.grid.height(); ++y) {
        for (int x = 0; x < scene.grid.width(); ++x) {
            const double d = from_goal.at(x, y);
            if (std::isfinite(d) && d >= kMinStartGoalM) candidates.push_back({x, y});
        }
    }
    Pose pose = scene.start_pose;
    if (!candidates.empty()) {
        const GridCell c = candidates[rng.bounded(candidates.size())];
        pose.position = cell_center(c, scene.resolution_m);
    }
    pose.heading_deg = kTurnDeg * rng.int_in(0, 11);
    return pose;
}

// Episode plan for a suite: total_episodes per mode, spread over the scenes
// round-robin (every scene gets episode 0 before any gets episode 1), rows
// ordered by (scene, episode, mode). Seeds derive from (base_seed, scene,
// episode) only, so every mode faces the same starts.
inline std::vector<EpisodeSpec> make_suite_specs(int n_scenes,
                                                 const std::vector<SelectorMode>& modes,
                                                 std::uint64_t base_seed, int total_episodes) {
    require(n_scenes > 0, "make_suite_specs: no scenes");
    require(!modes.empty(), "make_suite_specs: no modes");
    require(total_episodes > 0, "make_suite_specs: no episodes");

    std::vector<std::pair<int, int>> scene_eps; // (scene_idx, episode_idx)
    for (int e = 0; static_cast<int>(scene_eps.size()) < total_episodes; ++e) {
        for (int s = 0; s < n_scenes && static_cast<int>(scene_eps.size()) < total_episodes; ++s) {
            scene_eps.emplace_back(s, e);
        }
    }
    std::sort(scene_eps.begin(), scene_eps.end());

    std::vector<EpisodeSpec> specs;
    specs.reserve(scene_eps.size() * modes.size());
    for (const auto& [s, e] : scene_eps) {
        for (SelectorMode mode : modes) {
            specs.push_back({s, e, mode,
                             derive_seed(base_seed, static_cast<std::uint64_t>(s),
                                         static_cast<std::uint64_t>(e))});
        }
    }
    return specs;
}

// Runs every spec across `jobs` workers. Results land in spec order no matter
// how the workers are scheduled, so the report is identical at any
// parallelism. Episode failures (aborted records) do not stop the suite.
inline SuiteReport run_suite(const std::vector<Scene>& scenes,
                             const std::vector<EpisodeSpec>& specs, const RunConfig& cfg,
                             int jobs, const OracleFactory& oracle_factory) {
    require(!scenes.empty(), "run_suite: no scenes");
    for (const EpisodeSpec& spec : specs) {
        require(spec.scene_idx >= 0 && spec.scene_idx < static_cast<int>(scenes.size()),
                "run_suite: spec references a missing scene");
    }

    std::vector<EpisodeResult> rows(specs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            const EpisodeSpec& spec = specs[i];
            const Scene& scene = scenes[static_cast<std::size_t>(spec.scene_idx)];
            EpisodeOptions opt;
            opt.seed = spec.seed;
            opt.episode_idx = spec.episode_idx;
            if (spec.episode_idx > 0) opt.start = draw_start(scene, spec.seed);
            std::unique_ptr<VoteOracle> oracle;
            std::unique_ptr<MemoizingOracle> memo;
            if (spec.mode == SelectorMode::Shf) {
                oracle = oracle_factory(spec);
                if (cfg.memoize_votes) {
                    memo = std::make_unique<MemoizingOracle>(*oracle);
                    opt.oracle = memo.get();
                } else {
                    opt.oracle = oracle.get();
                }
            }
            rows[i] = run_episode(scene, spec.mode, cfg, opt);
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    SuiteReport report;
    report.config_fingerprint = config_fingerprint(cfg);
    report.rows = std::move(rows);
    report.aggregates = aggregate_by_mode(report.rows);
    return report;
}

} // namespace navbench
