#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "navbench/config.hpp"
#include "navbench/errors.hpp"
#include "navbench/language.hpp"

namespace navbench {

namespace detail {

// First standalone letter that names one of the n options: uppercase, not
// flanked by alphanumerics.
inline std::optional<int> parse_option_letter(const std::string& text, std::size_t n_options) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch < 'A' || ch > 'Z') continue;
        const bool left_ok =
            i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
        const bool right_ok =
            i + 1 == text.size() || !std::isalnum(static_cast<unsigned char>(text[i + 1]));
        if (!left_ok || !right_ok) continue;
        const std::size_t idx = static_cast<std::size_t>(ch - 'A');
        if (idx < n_options) return static_cast<int>(idx);
    }
    return std::nullopt;
}

} // namespace detail

// VoteOracle backed by a chat-completion HTTP endpoint. Not thread-safe;
// construct one per worker.
class LlmVoteOracle final : public VoteOracle {
public:
    explicit LlmVoteOracle(LlmEndpointConfig config)
        : config_(std::move(config)), client_(config_.base_url) {
        client_.set_connection_timeout(0, config_.timeout_ms * 1000LL);
        client_.set_read_timeout(0, config_.timeout_ms * 1000LL);
        client_.set_write_timeout(0, config_.timeout_ms * 1000LL);
        if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
            client_.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
        }
        if (!config_.transcript_path.empty()) {
            transcript_.open(config_.transcript_path, std::ios::app);
        }
    }

    std::optional<int> answer(const PromptText& prompt, const std::vector<int>& options) override {
        const std::string text = render(prompt);
        for (int ask = 0; ask < 2; ++ask) {
            const std::string content = complete(text);
            if (const auto idx = detail::parse_option_letter(content, options.size())) {
                return options[static_cast<std::size_t>(*idx)];
            }
        }
        log_warning("no option letter in completion after re-ask, counting abstention");
        return std::nullopt;
    }

private:
    std::string complete(const std::string& prompt_text) {
        const nlohmann::json body = {
            {"model", config_.model},
            {"temperature", config_.temperature},
            {"messages", {{{"role", "user"}, {"content", prompt_text}}}},
        };
        const std::string payload = body.dump();
        std::string last_error;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            log_line("request", payload);
            httplib::Result res = client_.Post(config_.path, payload, "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;
            }
            log_line("response", res->body);
            if (res->status != 200) {
                last_error = "status " + std::to_string(res->status);
                continue;
            }
            try {
                const nlohmann::json reply = nlohmann::json::parse(res->body);
                const nlohmann::json& choice = reply.at("choices").at(0);
                if (choice.contains("message"))
                    return choice.at("message").at("content").get<std::string>();
                return choice.at("text").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                last_error = std::string("bad response body: ") + e.what();
            }
        }
        throw TransportError("llm endpoint " + config_.base_url + config_.path +
                             " failed: " + last_error);
    }

    void log_line(const char* tag, const std::string& body) {
        if (transcript_.is_open()) transcript_ << tag << ' ' << body << '\n';
    }

    void log_warning(const std::string& message) {
        if (transcript_.is_open()) {
            transcript_ << "warn " << message << '\n';
        } else {
            std::cerr << "warn: " << message << '\n';
        }
    }

    LlmEndpointConfig config_;
    httplib::Client client_;
    std::ofstream transcript_;
};

} // namespace navbench
