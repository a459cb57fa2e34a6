#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "navbench/config.hpp"
#include "navbench/errors.hpp"
#include "navbench/islands.hpp"
#include "navbench/language.hpp"
#include "navbench/mapping.hpp"
#include "navbench/planner.hpp"
#include "navbench/rng.hpp"
#include "navbench/scene.hpp"
#include "navbench/valuemaps.hpp"

namespace navbench {

struct EpisodeResult {
    std::string scene_id;
    int episode_idx = 0;
    SelectorMode mode = SelectorMode::Dwfe;
    std::uint64_t seed = 0;
    bool success = false;
    bool aborted = false; // contract violation, reported distinctly from timeout
    std::string error;
    int steps = 0;
    double path_length_m = 0.0; // executed length, forward moves only
    double shortest_m = 0.0;    // ground-truth optimum to the success region
    int abstentions = 0;
    int vote_fallbacks = 0; // steps degraded to pure distance scores
    Pose start;
    std::string actions; // one char per step: F, L, R, S
    std::vector<Pose> trajectory;
};

// Per-step snapshot for tracing and visual debugging.
struct StepTrace {
    int step = 0;
    Pose pose; // before the action applies
    Action action = Action::Stop;
    std::optional<GridCell> target;
    const Path* path = nullptr; // this step's plan, when one exists
    bool gate_recovery = false; // unsafe forward replaced by an escape move
    bool blocked = false;       // forward ran into a wall and did not move
    int islands = 0;            // frontier islands visible to the selector
    int reach_cells = 0;        // believed-free cells reachable from the agent
    int masked_cells = 0;       // reachable cells still eligible as targets
    int scars = 0;              // collision marks pinned into the belief
    int spent_cells = 0;        // retired target cells so far
    const std::vector<FrontierIsland>* island_list = nullptr; // when computed
};

struct EpisodeOptions {
    std::uint64_t seed = 0;
    std::optional<Pose> start;     // overrides scene.start_pose
    VoteOracle* oracle = nullptr;  // required for the shf mode
    std::string dump_dir;          // per-step field dumps when nonempty
    int episode_idx = 0;
    std::function<void(const StepTrace&)> on_step; // trace hook, may be empty
};

namespace detail {

// A challenger target must beat the committed one by this much (on the
// normalized affordance scale) before the agent switches.
inline constexpr double kCommitMargin = 0.05;

// A target counts as visited within this range. Wider than the waypoint
// radius on purpose: with a fixed 0.20 m step the reachable stations can
// straddle a cell at just over 0.10 m on both sides.
inline constexpr double kTargetVisitedM = 0.15;

// Visiting a target retires its whole neighborhood: affordance plateaus are
// shallow, so the runner-up is usually the next cell over, and retiring one
// cell at a time would crawl across the plateau step by step.
inline void spend_disk(std::vector<std::uint8_t>& spent, std::size_t& spent_total,
                       const Grid<std::uint8_t>& shape, GridCell center, double radius_m,
                       double resolution_m) {
    const int r = static_cast<int>(radius_m / resolution_m);
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const GridCell c{center.x + dx, center.y + dy};
            if (!shape.in_bounds(c)) continue;
            if (double(dx) * dx + double(dy) * dy > double(r) * r) continue;
            const std::size_t i = shape.index(c);
            if (!spent[i]) {
                spent[i] = 1;
                ++spent_total;
            }
        }
    }
}

// Some islands cannot be sensed away: a corner sliver next to wall-interior
// cells stays a frontier no matter where the agent stands, and a scatter of
// such slivers holds the distance scores at their joint center forever. The
// tell is lingering: the agent has spent this many steps right next to the
// island and not one of its cells budged. Retire it. Any change to the cell
// set makes a new identity with a clean slate, so islands the agent merely
// passes on the way to real work come right back. Plain distance, no
// visibility test: the cells that most need retiring hug wall corners where
// no ray ever lands cleanly, so a sight requirement would spare exactly the
// islands the rule exists to remove.
inline constexpr double kLingerRadiusM = 2.0;
inline constexpr int kLingerStepCap = 40;

inline std::uint64_t island_signature(const FrontierIsland& island) {
    std::vector<GridCell> cells = island.cells;
    std::sort(cells.begin(), cells.end(), [](const GridCell& a, const GridCell& b) {
        return a.y == b.y ? a.x < b.x : a.y < b.y;
    });
    std::uint64_t h = 1469598103934665603ULL;
    for (const GridCell& c : cells) {
        h = (h ^ static_cast<std::uint32_t>(c.x)) * 1099511628211ULL;
        h = (h ^ static_cast<std::uint32_t>(c.y)) * 1099511628211ULL;
    }
    return h;
}

inline bool island_within(const FrontierIsland& island, Vec2 p, double radius_m,
                          double resolution_m) {
    for (const GridCell& c : island.cells)
        if (distance(p, cell_center(c, resolution_m)) <= radius_m) return true;
    return false;
}

// A ray can only enter a cell through one of its faces, so unknown territory
// with no face-path to believed-free space (every route walled off by
// observed cells) can never be sensed. Frontier cells whose unknown neighbors
// are all sealed like that would stay frontiers forever; drop them before
// clustering so the selectors never chase them.
inline std::vector<GridCell> observable_frontiers(const OccupancyGrid& belief,
                                                  std::vector<GridCell> frontiers) {
    const Grid<std::uint8_t>& g = belief.cells;
    Grid<std::uint8_t> open(g.width(), g.height(), 0);
    std::vector<GridCell> queue;
    for (int y = 0; y < g.height(); ++y) {
        for (int x = 0; x < g.width(); ++x) {
            if (belief.at({x, y}) == BeliefCell::Free) {
                open.at(x, y) = 1;
                queue.push_back({x, y});
            }
        }
    }
    static constexpr int kFaceX[4] = {1, -1, 0, 0};
    static constexpr int kFaceY[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const GridCell c = queue.back();
        queue.pop_back();
        for (int k = 0; k < 4; ++k) {
            const GridCell n{c.x + kFaceX[k], c.y + kFaceY[k]};
            if (!g.in_bounds(n) || open.at(n) || belief.at(n) == BeliefCell::Occupied)
                continue;
            open.at(n) = 1;
            queue.push_back(n);
        }
    }
    std::vector<GridCell> kept;
    kept.reserve(frontiers.size());
    for (const GridCell& f : frontiers) {
        bool live = false;
        for (int k = 0; k < 8 && !live; ++k) {
            const GridCell n{f.x + kNeighbor8X[k], f.y + kNeighbor8Y[k]};
            live = g.in_bounds(n) && belief.at(n) == BeliefCell::Unknown && open.at(n);
        }
        if (live) kept.push_back(f);
    }
    return kept;
}

// Reachable believed-free cell nearest to seed (straight-line metric, ties in
// row-major order).
inline std::optional<GridCell> nearest_reachable(const Grid<std::uint8_t>& reach, GridCell seed) {
    bool found = false;
    GridCell best{0, 0};
    long best_d2 = 0;
    for (int y = 0; y < reach.height(); ++y) {
        for (int x = 0; x < reach.width(); ++x) {
            if (!reach.at(x, y)) continue;
            const long dx = x - seed.x, dy = y - seed.y;
            const long d2 = dx * dx + dy * dy;
            if (!found || d2 < best_d2) {
                found = true;
                best = GridCell{x, y};
                best_d2 = d2;
            }
        }
    }
    if (!found) return std::nullopt;
    return best;
}

// The member cell closest to the island's centroid stands in for the
// centroid itself, which may fall on unknown or occupied ground.
inline GridCell island_representative(const FrontierIsland& island, double resolution_m) {
    GridCell best = island.cells.front();
    double best_d = distance(cell_center(best, resolution_m), island.centroid);
    for (const GridCell& c : island.cells) {
        const double d = distance(cell_center(c, resolution_m), island.centroid);
        if (d < best_d) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

inline void dump_field(const ValueField& field, const std::string& dir, int step_idx,
                       const char* name) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "/step_%03d_%s.pgm", step_idx, name);
    std::ofstream out(dir + buf);
    if (out) write_pgm(field, out);
}

// True when a forward move from this position at this heading would cross no
// believed-occupied cell. Occupied belief from ray hits is always truly
// occupied, so an unsafe sweep is a certain collision.
inline bool sweep_safe(const OccupancyGrid& belief, const Vec2& position, int heading_deg) {
    bool safe = true;
    march_cells(position, heading_dir(heading_deg), kForwardStepM, belief.resolution_m,
                [&](const GridCell& c, double) {
                    if (!belief.cells.in_bounds(c) || belief.known_occupied(c)) {
                        safe = false;
                        return false;
                    }
                    return true;
                });
    return safe;
}

// A physical collision on a believed-clear sweep means some swept cell is
// occupied despite the belief. The farthest swept cell is the least-observed
// guess; recording it blocked keeps re-planning from retrying the same move.
// A wrong guess costs one more collision here, never a livelock.
inline void scar_blocked_sweep(const OccupancyGrid& belief, const Pose& pose,
                               std::vector<GridCell>& scars) {
    const GridCell here = cell_of(pose.position, belief.resolution_m);
    GridCell last = here;
    march_cells(pose.position, heading_dir(pose.heading_deg), kForwardStepM,
                belief.resolution_m, [&](const GridCell& c, double) {
                    if (!belief.cells.in_bounds(c) || belief.known_occupied(c)) return false;
                    last = c;
                    return true;
                });
    if (!(last == here)) scars.push_back(last);
}

// Collision recovery move: rotate toward the believed-safe heading closest to
// the current one (ties prefer left), go forward once aligned with it. With
// no safe heading at all, keep rotating left.
inline Action escape_action(const OccupancyGrid& belief, const Pose& pose) {
    for (int k : {0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6}) {
        const int h = ((pose.heading_deg + k * kTurnDeg) % 360 + 360) % 360;
        if (!sweep_safe(belief, pose.position, h)) continue;
        if (k == 0) return Action::Forward;
        return k > 0 ? Action::TurnLeft : Action::TurnRight;
    }
    return Action::TurnLeft;
}

} // namespace detail

// Runs one episode to stop or timeout. Per step: sense, integrate, track
// sightings, then either drive at the goal (goal-directed mode latches on
// first sighting) or pick a frontier target per the selector mode, plan, and
// emit one action. Success requires the goal visible within 0.25 m when stop
// is issued.
inline EpisodeResult run_episode(const Scene& scene, SelectorMode mode, const RunConfig& cfg,
                                 const EpisodeOptions& opt) {
    require(mode != SelectorMode::GoalDirected,
            "run_episode: goal_directed is an internal phase, not a runnable mode");
    require(mode != SelectorMode::Shf || opt.oracle != nullptr,
            "run_episode: shf mode requires a vote oracle");

    const double res = scene.resolution_m;
    EpisodeResult result;
    result.scene_id = scene.id;
    result.episode_idx = opt.episode_idx;
    result.mode = mode;
    result.seed = opt.seed;
    result.start = opt.start.value_or(scene.start_pose);
    result.shortest_m = shortest_path_length(scene, result.start);

    Pose pose = result.start;
    result.trajectory.push_back(pose);
    OccupancyGrid belief = OccupancyGrid::shadow_of(scene);
    Rng rng(derive_seed(opt.seed, 0xba5e11e5ULL));

    std::vector<Sighting> seen;
    std::set<std::pair<std::string, std::size_t>> seen_keys;
    std::vector<Sighting> goal_sightings;
    bool goal_directed = false;
    // Collision recovery. The fixed 0.20 m forward step can overshoot a close
    // waypoint into a wall the path legally skirts; when that is about to
    // happen (or just happened), sidestep via the nearest safe heading, then
    // hand control back to the planner. Scars record cells that physically
    // blocked a believed-clear sweep. Spent cells are exploration targets the
    // agent has already reached (or proven unreachable by a straight step);
    // arriving is all the information a target can yield, so they drop out of
    // re-selection and deterministic decisions cannot cycle.
    // Each new observation rescales the per-island distance fields, so the
    // argmax can dither between two far-apart, near-tied candidates. The agent
    // therefore commits to its target: a challenger has to beat the incumbent
    // by a clear margin (field modes) or the incumbent has to die (reached,
    // spent, or cut off) before the target changes.
    bool recovering = false;
    std::vector<GridCell> scars;
    std::vector<std::uint8_t> spent(belief.cells.size(), 0);
    std::size_t spent_total = 0;
    std::optional<GridCell> committed;
    std::unordered_map<std::uint64_t, int> island_linger;
    std::size_t retired_islands = 0;
    // Everything the exploration policy depends on is (cell, heading,
    // committed target, recovery flag) plus monotone knowledge. Seeing the
    // same tuple twice with no knowledge growth proves a loop; spending the
    // committed target then is the smallest change that breaks it.
    std::unordered_map<std::uint64_t, std::uint64_t> visit_knowledge;

    try {
        for (int step_idx = 0; step_idx < cfg.max_steps; ++step_idx) {
            const Observation obs = sense(scene, pose, cfg.sensor);
            integrate(belief, pose, obs);
            // Collision evidence outranks line-of-sight evidence.
            for (const GridCell& c : scars) belief.set(c, BeliefCell::Occupied);

            bool goal_in_reach = false;
            for (const ObjectSighting& s : obs.visible_objects) {
                const Vec2 position = sighting_position(pose, s);
                if (s.category == scene.goal_category) {
                    goal_directed = true;
                    goal_sightings.push_back({s.category, position});
                    goal_in_reach = goal_in_reach || s.range_m <= kSuccessRadiusM;
                }
                const auto key = std::make_pair(s.category, belief.cells.index(cell_of(position, res)));
                if (seen_keys.insert(key).second) seen.push_back({s.category, position});
            }

            if (!goal_directed && committed) {
                const std::uint64_t knowledge =
                    belief.count(BeliefCell::Free) + belief.count(BeliefCell::Occupied) +
                    spent_total + scars.size() + seen.size() + retired_islands;
                const GridCell here = cell_of(pose.position, res);
                const std::uint64_t heading_idx =
                    static_cast<std::uint64_t>(((pose.heading_deg % 360) + 360) % 360 / 30);
                std::uint64_t key = belief.cells.index(*committed) + 1;
                key = key * belief.cells.size() + belief.cells.index(here);
                key = key * 12 + heading_idx;
                key = key * 2 + (recovering ? 1 : 0);
                const auto [it, fresh] = visit_knowledge.try_emplace(key, knowledge);
                if (!fresh && it->second == knowledge) {
                    detail::spend_disk(spent, spent_total, belief.cells, *committed,
                                       detail::kTargetVisitedM, res);
                    committed.reset();
                }
                if (!fresh) it->second = knowledge;
            }

            Action action;
            std::optional<GridCell> target;
            std::optional<Path> planned;
            bool gate_fired = false;
            int trace_islands = 0, trace_reach = 0, trace_masked = 0;
            std::vector<FrontierIsland> trace_island_list;
            if (goal_directed && goal_in_reach) {
                action = Action::Stop;
            } else if (recovering) {
                action = detail::escape_action(belief, pose);
            } else {
                action = Action::TurnLeft; // fallback: hold position, keep looking
                std::vector<FrontierIsland>& islands = trace_island_list;
                if (!goal_directed) {
                    islands = cluster(
                        detail::observable_frontiers(belief, extract_frontiers(belief)),
                        cfg.cluster_eps_m, cfg.cluster_min_samples, res);
                    std::erase_if(islands, [&](const FrontierIsland& f) {
                        const std::uint64_t sig = detail::island_signature(f);
                        int& linger = island_linger[sig];
                        if (linger < detail::kLingerStepCap &&
                            detail::island_within(f, pose.position,
                                                  detail::kLingerRadiusM, res)) {
                            ++linger;
                            if (linger == detail::kLingerStepCap) ++retired_islands;
                        }
                        return linger >= detail::kLingerStepCap;
                    });
                    attach_names(islands, seen, cfg.name_radius_m, res);
                }

                {
                    const GridCell agent_cell = cell_of(pose.position, res);
                    const Grid<double> reach_dist =
                        geodesic_distances(believed_free_mask(belief), agent_cell, res);
                    Grid<std::uint8_t> reach(reach_dist.width(), reach_dist.height(), 0);
                    for (std::size_t i = 0; i < reach_dist.size(); ++i)
                        reach.cells()[i] = std::isfinite(reach_dist.cells()[i]);
                    trace_islands = static_cast<int>(islands.size());
                    for (std::size_t i = 0; i < reach.size(); ++i) trace_reach += reach.cells()[i];

                    std::optional<ValueField> plan_field;

                    if (goal_directed) {
                        target = detail::nearest_reachable(
                            reach, goal_directed_target(goal_sightings, res));
                    } else {
                        const auto arrived = [&](const GridCell& c) {
                            return distance(pose.position, cell_center(c, res)) <=
                                   detail::kTargetVisitedM;
                        };
                        if (committed && arrived(*committed)) {
                            detail::spend_disk(spent, spent_total, belief.cells, *committed,
                                               detail::kTargetVisitedM, res);
                            committed.reset();
                        }
                        Grid<std::uint8_t> mask = reach;
                        for (std::size_t i = 0; i < mask.size(); ++i)
                            if (spent[i]) mask.cells()[i] = 0;
                        if (committed && !mask.at(*committed)) committed.reset();
                        for (std::size_t i = 0; i < mask.size(); ++i)
                            trace_masked += mask.cells()[i];
                        if (islands.empty()) {
                            // Nothing left worth mapping: every island is either
                            // resolved or retired. The goal may still be unseen,
                            // so sweep the far corners of known space until it
                            // turns up or the budget runs out.
                            if (committed) {
                                target = committed;
                            } else {
                                double farthest = -1.0;
                                for (int y = 0; y < mask.height(); ++y) {
                                    for (int x = 0; x < mask.width(); ++x) {
                                        if (!mask.at(x, y)) continue;
                                        const double d = reach_dist.at(x, y);
                                        if (d > farthest) {
                                            farthest = d;
                                            target = GridCell{x, y};
                                        }
                                    }
                                }
                                committed = target;
                            }
                        } else if (mode == SelectorMode::Dwfe || mode == SelectorMode::Shf) {
                            ValueField avm = dwfe_scores(belief, islands, cfg.dwfe_aggregate);
                            if (mode == SelectorMode::Shf) {
                                try {
                                    const VoteTally tally = tally_votes(*opt.oracle,
                                                                        scene.goal_category,
                                                                        islands, cfg.votes_k);
                                    result.abstentions += tally.abstentions;
                                    avm = shf_inject(avm, islands, tally.h(), cfg.eta);
                                } catch (const TransportError&) {
                                    ++result.vote_fallbacks;
                                }
                            }
                            std::vector<ValueField> fields{std::move(avm)};
                            if (cfg.trajectory_penalty) {
                                fields.push_back(trajectory_penalty(
                                    belief.cells.width(), belief.cells.height(), res,
                                    result.trajectory, cfg.trajectory_radius_m,
                                    cfg.trajectory_lambda));
                            }
                            ValueField aff = compose_affordance(fields);
                            if (!opt.dump_dir.empty()) {
                                detail::dump_field(fields.front(), opt.dump_dir, step_idx, "avm");
                                detail::dump_field(aff, opt.dump_dir, step_idx, "affordance");
                            }
                            const auto pick = [&]() -> std::optional<GridCell> {
                                for (std::size_t i = 0; i < mask.size(); ++i)
                                    if (mask.cells()[i]) return select_target_masked(aff, mask);
                                return std::nullopt;
                            };
                            target = pick();
                            while (target && arrived(*target)) {
                                detail::spend_disk(spent, spent_total, belief.cells, *target,
                                                   detail::kTargetVisitedM, res);
                                for (std::size_t i = 0; i < mask.size(); ++i)
                                    if (spent[i]) mask.cells()[i] = 0;
                                target = pick();
                            }
                            if (committed &&
                                (!target || aff.values.at(*target) <=
                                                aff.values.at(*committed) +
                                                    detail::kCommitMargin))
                                target = committed;
                            committed = target;
                            plan_field = std::move(aff);
                        } else {
                            // Baselines walk to an island's centroid stand-in. Nearest
                            // re-picks the closest island every step, as greedy selection
                            // does, so a tie between two fronts makes it change its mind;
                            // random keeps its draw until the walk completes.
                            if (mode == SelectorMode::RandomFrontierBaseline && committed) {
                                target = committed;
                            } else {
                                std::vector<std::pair<GridCell, double>> reps;
                                for (const FrontierIsland& f : islands) {
                                    const GridCell rep = detail::island_representative(f, res);
                                    if (mask.at(rep)) reps.emplace_back(rep, reach_dist.at(rep));
                                }
                                while (!reps.empty()) {
                                    std::size_t best = 0;
                                    if (mode == SelectorMode::NearestFrontierBaseline) {
                                        for (std::size_t i = 1; i < reps.size(); ++i)
                                            if (reps[i].second < reps[best].second) best = i;
                                    } else {
                                        best = rng.bounded(reps.size());
                                    }
                                    if (!arrived(reps[best].first)) {
                                        target = reps[best].first;
                                        break;
                                    }
                                    detail::spend_disk(spent, spent_total, belief.cells,
                                                       reps[best].first,
                                                       detail::kTargetVisitedM, res);
                                    reps.erase(reps.begin() +
                                               static_cast<std::ptrdiff_t>(best));
                                }
                                committed = target;
                            }
                        }
                    }

                    if (target) {
                        if (!plan_field) {
                            plan_field.emplace(belief.cells.width(), belief.cells.height(),
                                               FieldKind::Affordance, 0.5);
                        }
                        planned = plan(belief, *plan_field, agent_cell, *target, cfg.c_min);
                        if (planned) {
                            action = next_action(pose, *planned, res);
                            if (action == Action::Forward &&
                                !detail::sweep_safe(belief, pose.position, pose.heading_deg)) {
                                // Certain collision; sidestep instead of ramming. If the
                                // unsafe forward was aimed at the target itself, the agent
                                // is already as close as the step length allows.
                                if (!goal_directed) {
                                    for (const GridCell& c : planned->cells) {
                                        if (distance(pose.position, cell_center(c, res)) <=
                                            kWaypointReachedM)
                                            continue;
                                        if (c == planned->cells.back())
                                            detail::spend_disk(spent, spent_total,
                                                               belief.cells, c,
                                                               detail::kTargetVisitedM, res);
                                        break;
                                    }
                                }
                                recovering = true;
                                gate_fired = true;
                                action = detail::escape_action(belief, pose);
                            }
                        }
                    }
                }
            }

            const Pose next = step(scene, pose, action);
            const bool blocked = action == Action::Forward && next.position == pose.position;
            if (opt.on_step)
                opt.on_step({step_idx, pose, action, target,
                             planned ? &*planned : nullptr, gate_fired, blocked,
                             trace_islands, trace_reach, trace_masked,
                             static_cast<int>(scars.size()),
                             static_cast<int>(spent_total), &trace_island_list});
            if (blocked) {
                detail::scar_blocked_sweep(belief, pose, scars);
                recovering = true;
            } else if (recovering && action == Action::Forward) {
                recovering = false;
            }
            if (action == Action::Forward && !blocked)
                result.path_length_m += kForwardStepM;
            pose = next;
            result.actions += action_char(action);
            ++result.steps;
            result.trajectory.push_back(pose);

            if (action == Action::Stop) {
                result.success = goal_reached(scene, pose, obs);
                break;
            }
        }
    } catch (const ContractViolation& e) {
        result.aborted = true;
        result.success = false;
        result.error = e.what();
    }
    return result;
}

} // namespace navbench
