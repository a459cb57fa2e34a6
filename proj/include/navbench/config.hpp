#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "navbench/errors.hpp"
#include "navbench/scene.hpp"
#include "navbench/valuemaps.hpp"

namespace navbench {

// Endpoint settings for the live vote oracle. The credential is read from the
// environment variable named by api_key_env and never appears in config files
// or CLI arguments.
struct LlmEndpointConfig {
    std::string base_url = "http://127.0.0.1:8080";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4.1";
    double temperature = 0.0;
    int timeout_ms = 10000;
    int max_retries = 2;
    std::string api_key_env = "NAVBENCH_LLM_API_KEY";
    std::string transcript_path; // empty disables request/response logging
};

// Every tunable of a run. Kinematics (0.20 m forward, 30 degree turns) and
// the 0.25 m success radius are contract constants, not configuration.
struct RunConfig {
    SensorConfig sensor;

    double cluster_eps_m = 1.0;
    int cluster_min_samples = 1;
    double name_radius_m = 2.0;

    DwfeAggregate dwfe_aggregate = DwfeAggregate::Sum;

    int votes_k = 5;
    double eta = 1.0;
    std::string oracle = "stub"; // "stub" or "llm"
    bool memoize_votes = false;

    double c_min = 0.05;
    int max_steps = 500;

    bool trajectory_penalty = false;
    double trajectory_radius_m = 0.3;
    double trajectory_lambda = 0.1;

    LlmEndpointConfig llm;
};

namespace detail {

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                       const char* section) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : allowed) ok = ok || key == k;
        if (!ok)
            throw FormatError(std::string("config: unknown key \"") + key + "\" in " + section);
    }
}

template <typename T>
void maybe(const nlohmann::json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

} // namespace detail

inline nlohmann::json to_json(const RunConfig& c) {
    return {
        {"sensor",
         {{"fov_deg", c.sensor.fov_deg},
          {"n_rays", c.sensor.n_rays},
          {"max_range_m", c.sensor.max_range_m}}},
        {"cluster",
         {{"eps_m", c.cluster_eps_m},
          {"min_samples", c.cluster_min_samples},
          {"name_radius_m", c.name_radius_m}}},
        {"dwfe", {{"aggregate", c.dwfe_aggregate == DwfeAggregate::Sum ? "sum" : "max"}}},
        {"shf",
         {{"votes_k", c.votes_k},
          {"eta", c.eta},
          {"oracle", c.oracle},
          {"memoize_votes", c.memoize_votes}}},
        {"planner", {{"c_min", c.c_min}}},
        {"episode", {{"max_steps", c.max_steps}}},
        {"trajectory",
         {{"enabled", c.trajectory_penalty},
          {"radius_m", c.trajectory_radius_m},
          {"lambda", c.trajectory_lambda}}},
        {"llm",
         {{"base_url", c.llm.base_url},
          {"path", c.llm.path},
          {"model", c.llm.model},
          {"temperature", c.llm.temperature},
          {"timeout_ms", c.llm.timeout_ms},
          {"max_retries", c.llm.max_retries},
          {"api_key_env", c.llm.api_key_env}}},
    };
}

// Overrides defaults with whatever keys the document provides; unknown keys
// or out-of-range values are rejected rather than ignored.
inline RunConfig config_from_json(const nlohmann::json& doc) {
    RunConfig c;
    try {
        detail::check_keys(doc, {"sensor", "cluster", "dwfe", "shf", "planner", "episode",
                                 "trajectory", "llm"},
                           "top level");
        if (doc.contains("sensor")) {
            const auto& s = doc.at("sensor");
            detail::check_keys(s, {"fov_deg", "n_rays", "max_range_m"}, "sensor");
            detail::maybe(s, "fov_deg", c.sensor.fov_deg);
            detail::maybe(s, "n_rays", c.sensor.n_rays);
            detail::maybe(s, "max_range_m", c.sensor.max_range_m);
        }
        if (doc.contains("cluster")) {
            const auto& s = doc.at("cluster");
            detail::check_keys(s, {"eps_m", "min_samples", "name_radius_m"}, "cluster");
            detail::maybe(s, "eps_m", c.cluster_eps_m);
            detail::maybe(s, "min_samples", c.cluster_min_samples);
            detail::maybe(s, "name_radius_m", c.name_radius_m);
        }
        if (doc.contains("dwfe")) {
            const auto& s = doc.at("dwfe");
            detail::check_keys(s, {"aggregate"}, "dwfe");
            std::string agg = "sum";
            detail::maybe(s, "aggregate", agg);
            if (agg == "sum") {
                c.dwfe_aggregate = DwfeAggregate::Sum;
            } else if (agg == "max") {
                c.dwfe_aggregate = DwfeAggregate::Max;
            } else {
                throw FormatError("config: dwfe.aggregate must be \"sum\" or \"max\"");
            }
        }
        if (doc.contains("shf")) {
            const auto& s = doc.at("shf");
            detail::check_keys(s, {"votes_k", "eta", "oracle", "memoize_votes"}, "shf");
            detail::maybe(s, "votes_k", c.votes_k);
            detail::maybe(s, "eta", c.eta);
            detail::maybe(s, "oracle", c.oracle);
            detail::maybe(s, "memoize_votes", c.memoize_votes);
            if (c.oracle != "stub" && c.oracle != "llm")
                throw FormatError("config: shf.oracle must be \"stub\" or \"llm\"");
        }
        if (doc.contains("planner")) {
            const auto& s = doc.at("planner");
            detail::check_keys(s, {"c_min"}, "planner");
            detail::maybe(s, "c_min", c.c_min);
        }
        if (doc.contains("episode")) {
            const auto& s = doc.at("episode");
            detail::check_keys(s, {"max_steps"}, "episode");
            detail::maybe(s, "max_steps", c.max_steps);
        }
        if (doc.contains("trajectory")) {
            const auto& s = doc.at("trajectory");
            detail::check_keys(s, {"enabled", "radius_m", "lambda"}, "trajectory");
            detail::maybe(s, "enabled", c.trajectory_penalty);
            detail::maybe(s, "radius_m", c.trajectory_radius_m);
            detail::maybe(s, "lambda", c.trajectory_lambda);
        }
        if (doc.contains("llm")) {
            const auto& s = doc.at("llm");
            detail::check_keys(s, {"base_url", "path", "model", "temperature", "timeout_ms",
                                   "max_retries", "api_key_env"},
                               "llm");
            detail::maybe(s, "base_url", c.llm.base_url);
            detail::maybe(s, "path", c.llm.path);
            detail::maybe(s, "model", c.llm.model);
            detail::maybe(s, "temperature", c.llm.temperature);
            detail::maybe(s, "timeout_ms", c.llm.timeout_ms);
            detail::maybe(s, "max_retries", c.llm.max_retries);
            detail::maybe(s, "api_key_env", c.llm.api_key_env);
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("config: ") + e.what());
    }

    if (!(c.sensor.fov_deg > 0.0 && c.sensor.fov_deg <= 360.0))
        throw FormatError("config: sensor.fov_deg must be in (0, 360]");
    if (c.sensor.n_rays < 2) throw FormatError("config: sensor.n_rays must be >= 2");
    if (!(c.sensor.max_range_m > 0.0)) throw FormatError("config: sensor.max_range_m must be > 0");
    if (!(c.cluster_eps_m > 0.0)) throw FormatError("config: cluster.eps_m must be > 0");
    if (c.cluster_min_samples < 1) throw FormatError("config: cluster.min_samples must be >= 1");
    if (!(c.name_radius_m >= 0.0)) throw FormatError("config: cluster.name_radius_m must be >= 0");
    if (c.votes_k < 1) throw FormatError("config: shf.votes_k must be >= 1");
    if (!(c.c_min > 0.0)) throw FormatError("config: planner.c_min must be > 0");
    if (c.max_steps < 1) throw FormatError("config: episode.max_steps must be >= 1");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("config file " + path + ": " + e.what());
    }
    return config_from_json(doc);
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stable hex digest of the effective configuration, embedded in reports so a
// result row can be traced to the exact knob settings that produced it.
inline std::string config_fingerprint(const RunConfig& c) {
    const std::uint64_t h = fnv1a64(to_json(c).dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace navbench
