#pragma once

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hatebench/error.hpp"
#include "hatebench/generation.hpp"

namespace hatebench {

// Chat-completions style or a bare {"prompt"} -> {"text"} inference
// server. Credentials come from the environment variable named in the
// endpoint config, never from config values.
enum class LlmWireStyle { openai_chat, simple };

struct LlmEndpoint {
    std::string llm_id;
    std::string base_url;
    std::string path;
    LlmWireStyle style = LlmWireStyle::simple;
    std::string model;       // remote model name, chat style only
    std::string api_key_env; // empty = unauthenticated
    int concurrency = 4;
    std::chrono::milliseconds timeout{60000};
};

class RemoteLlmClient : public LlmClient {
public:
    explicit RemoteLlmClient(LlmEndpoint endpoint) : endpoint_(std::move(endpoint)) {
        client_ = std::make_unique<httplib::Client>(endpoint_.base_url);
        const auto secs =
            std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout).count();
        client_->set_connection_timeout(secs > 0 ? secs : 1, 0);
        client_->set_read_timeout(secs > 0 ? secs : 1, 0);
    }

    std::string llm_id() const override { return endpoint_.llm_id; }
    int max_concurrency() const override { return endpoint_.concurrency; }

    Completion complete(const std::string& prompt, const SamplingParams& sampling) override {
        httplib::Headers headers{{"Content-Type", "application/json"}};
        if (!endpoint_.api_key_env.empty()) {
            const char* key = std::getenv(endpoint_.api_key_env.c_str());
            if (key == nullptr)
                throw QueryFailed("environment variable " + endpoint_.api_key_env + " is not set");
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        json body;
        if (endpoint_.style == LlmWireStyle::openai_chat) {
            body = {{"model", endpoint_.model},
                    {"temperature", sampling.temperature},
                    {"max_tokens", sampling.max_tokens},
                    {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
        } else {
            body = {{"prompt", prompt},
                    {"temperature", sampling.temperature},
                    {"max_tokens", sampling.max_tokens}};
        }

        const auto t0 = Clock::now();
        auto res = client_->Post(endpoint_.path, headers, body.dump(), "application/json");
        const auto latency = std::chrono::duration_cast<Micros>(Clock::now() - t0);
        if (!res)
            throw QueryFailed("transport error contacting " + endpoint_.base_url + ": " +
                              httplib::to_string(res.error()));
        if (res->status != 200)
            throw QueryFailed("llm endpoint returned status " + std::to_string(res->status));

        try {
            const json payload = json::parse(res->body);
            std::string text;
            if (endpoint_.style == LlmWireStyle::openai_chat)
                text = payload.at("choices").at(0).at("message").at("content").get<std::string>();
            else
                text = payload.at("text").get<std::string>();
            return {std::move(text), latency};
        } catch (const json::exception& e) {
            throw QueryFailed(std::string("unparseable llm response: ") + e.what());
        }
    }

private:
    LlmEndpoint endpoint_;
    std::unique_ptr<httplib::Client> client_;
};

} // namespace hatebench
