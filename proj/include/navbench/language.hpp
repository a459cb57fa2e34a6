#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "navbench/errors.hpp"
#include "navbench/islands.hpp"

namespace navbench {

enum class PromptKind : std::uint8_t { Follow, Avoid };

struct PromptCluster {
    char label = 'A';
    std::vector<std::string> names;
};

// Structured prompt: options are labeled A, B, C, ... in island-id order and
// carry object names only, never distances.
struct PromptText {
    PromptKind kind = PromptKind::Follow;
    std::string goal;
    std::vector<PromptCluster> clusters;
};

inline std::string render(const PromptText& prompt) {
    std::string text = prompt.kind == PromptKind::Follow
                           ? "Which cluster should a robot follow to find a <" + prompt.goal + ">?"
                           : "Which cluster should it avoid?";
    for (const PromptCluster& c : prompt.clusters) {
        text += ' ';
        text += c.label;
        text += ')';
        if (c.names.empty()) {
            text += " (nothing seen)";
        } else {
            for (std::size_t i = 0; i < c.names.size(); ++i) {
                text += i == 0 ? " " : ", ";
                text += c.names[i];
            }
        }
    }
    return text;
}

// The single-letter option protocol caps how many islands one prompt can
// carry.
inline constexpr int kMaxPromptIslands = 26;

inline PromptText build_prompt(PromptKind kind, const std::string& goal,
                               const std::vector<FrontierIsland>& islands) {
    require(!islands.empty(), "build_prompt: no islands");
    require(static_cast<int>(islands.size()) <= kMaxPromptIslands,
            "build_prompt: more islands than option letters");
    std::vector<const FrontierIsland*> ordered;
    ordered.reserve(islands.size());
    for (const FrontierIsland& f : islands) ordered.push_back(&f);
    std::sort(ordered.begin(), ordered.end(),
              [](const FrontierIsland* a, const FrontierIsland* b) { return a->id < b->id; });

    PromptText prompt;
    prompt.kind = kind;
    prompt.goal = goal;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        prompt.clusters.push_back({static_cast<char>('A' + i), ordered[i]->names});
    }
    return prompt;
}

// Answers one prompt by picking an island id from options, or abstains
// (nullopt) when no usable answer could be produced. Transport-level failures
// throw TransportError instead.
class VoteOracle {
public:
    virtual ~VoteOracle() = default;
    virtual std::optional<int> answer(const PromptText& prompt, const std::vector<int>& options) = 0;
};

struct IslandVotes {
    int n_plus = 0;
    int n_minus = 0;
    int h() const { return n_plus - n_minus; }
};

struct VoteTally {
    std::map<int, IslandVotes> votes; // keyed by island id, one entry per island
    int abstentions = 0;

    std::map<int, int> h() const {
        std::map<int, int> out;
        for (const auto& [id, v] : votes) out[id] = v.h();
        return out;
    }
};

// Issues k follow and k avoid queries against the same two prompts and counts
// which island each answer selects. Every island gets a tally entry even with
// zero votes; abstentions are counted, not attributed.
inline VoteTally tally_votes(VoteOracle& oracle, const std::string& goal,
                             const std::vector<FrontierIsland>& islands, int k) {
    require(k >= 1, "tally_votes: k must be positive");
    const PromptText follow = build_prompt(PromptKind::Follow, goal, islands);
    const PromptText avoid = build_prompt(PromptKind::Avoid, goal, islands);
    std::vector<int> options;
    options.reserve(islands.size());
    for (const FrontierIsland& f : islands) options.push_back(f.id);
    std::sort(options.begin(), options.end());

    VoteTally tally;
    for (int id : options) tally.votes[id];

    const auto in_options = [&](int id) {
        return std::find(options.begin(), options.end(), id) != options.end();
    };
    for (int j = 0; j < k; ++j) {
        if (std::optional<int> id = oracle.answer(follow, options)) {
            require(in_options(*id), "tally_votes: follow answer outside options");
            ++tally.votes[*id].n_plus;
        } else {
            ++tally.abstentions;
        }
    }
    for (int j = 0; j < k; ++j) {
        if (std::optional<int> id = oracle.answer(avoid, options)) {
            require(in_options(*id), "tally_votes: avoid answer outside options");
            ++tally.votes[*id].n_minus;
        } else {
            ++tally.abstentions;
        }
    }
    return tally;
}

// Category-pair affinity weights; lookups ignore pair order and fall back to
// 0 for unknown pairs.
using CooccurrenceTable = std::map<std::pair<std::string, std::string>, double>;

inline double cooccurrence_weight(const CooccurrenceTable& table, const std::string& a,
                                  const std::string& b) {
    if (auto it = table.find({a, b}); it != table.end()) return it->second;
    if (auto it = table.find({b, a}); it != table.end()) return it->second;
    return 0.0;
}

// Deterministic test double for the live model: scores each cluster by the
// best goal/name affinity, follows the argmax and avoids the argmin, ties
// resolving to the lowest label.
class CooccurrenceStub final : public VoteOracle {
public:
    explicit CooccurrenceStub(CooccurrenceTable table) : table_(std::move(table)) {}

    std::optional<int> answer(const PromptText& prompt, const std::vector<int>& options) override {
        require(prompt.clusters.size() == options.size(),
                "cooccurrence stub: prompt/options size mismatch");
        require(!options.empty(), "cooccurrence stub: no options");
        std::size_t best = 0;
        double best_score = cluster_score(prompt.goal, prompt.clusters[0]);
        for (std::size_t i = 1; i < prompt.clusters.size(); ++i) {
            const double s = cluster_score(prompt.goal, prompt.clusters[i]);
            const bool better = prompt.kind == PromptKind::Follow ? s > best_score : s < best_score;
            if (better) {
                best = i;
                best_score = s;
            }
        }
        return options[best];
    }

private:
    double cluster_score(const std::string& goal, const PromptCluster& cluster) const {
        double score = 0.0;
        for (const std::string& name : cluster.names)
            score = std::max(score, cooccurrence_weight(table_, goal, name));
        return score;
    }

    CooccurrenceTable table_;
};

// Optional wrapper that reuses the inner oracle's first answer for repeated
// identical prompts. Identical by rendered text and option list, so a
// k-sample tally collapses to one query per prompt.
class MemoizingOracle final : public VoteOracle {
public:
    explicit MemoizingOracle(VoteOracle& inner) : inner_(inner) {}

    std::optional<int> answer(const PromptText& prompt, const std::vector<int>& options) override {
        std::string key = render(prompt);
        for (int id : options) {
            key += '|';
            key += std::to_string(id);
        }
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const std::optional<int> out = inner_.answer(prompt, options);
        cache_.emplace(std::move(key), out);
        return out;
    }

    void reset() { cache_.clear(); }

private:
    VoteOracle& inner_;
    std::map<std::string, std::optional<int>> cache_;
};

} // namespace navbench
