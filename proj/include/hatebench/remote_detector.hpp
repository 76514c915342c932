#pragma once

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hatebench/detector.hpp"
#include "hatebench/error.hpp"

namespace hatebench {

// Wire formats of the supported providers. `simple` is the local
// inference-server adapter: POST {"text": ...} and read either a bare
// {"score": x} or {"scores": {attribute: x}} / {"probs": {...}} map,
// which is how tri-class local models expose their hate-class
// probability.
enum class ProviderStyle { perspective, openai_moderation, simple };

inline ProviderStyle provider_style_from_string(std::string_view s) {
    if (s == "perspective") return ProviderStyle::perspective;
    if (s == "openai_moderation") return ProviderStyle::openai_moderation;
    if (s == "simple") return ProviderStyle::simple;
    throw InvalidInput("unknown provider style: " + std::string(s));
}

struct RemoteEndpoint {
    std::string base_url;       // e.g. http://localhost:8080 or https://api...
    std::string path;           // request path
    ProviderStyle style = ProviderStyle::simple;
    std::string hate_attribute; // provider attribute read as hate
    std::string api_key_env;    // env var holding the key; empty = no auth
    std::chrono::milliseconds timeout{10000};
};

class RemoteJsonDetector : public Detector {
public:
    explicit RemoteJsonDetector(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {
        client_ = std::make_unique<httplib::Client>(endpoint_.base_url);
        const auto secs =
            std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout).count();
        client_->set_connection_timeout(secs > 0 ? secs : 1, 0);
        client_->set_read_timeout(secs > 0 ? secs : 1, 0);
    }

    ProviderResponse score(const std::string& text) override {
        const std::string key = api_key();
        std::string path = endpoint_.path;
        httplib::Headers headers{{"Content-Type", "application/json"}};
        json body;

        switch (endpoint_.style) {
            case ProviderStyle::perspective:
                if (!key.empty()) path += (path.find('?') == std::string::npos ? "?" : "&");
                if (!key.empty()) path += "key=" + key;
                body = {{"comment", {{"text", text}}},
                        {"languages", json::array({"en"})},
                        {"requestedAttributes", {{endpoint_.hate_attribute, json::object()}}}};
                break;
            case ProviderStyle::openai_moderation:
                if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
                body = {{"input", text}};
                break;
            case ProviderStyle::simple:
                if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
                body = {{"text", text}};
                break;
        }

        auto res = client_->Post(path, headers, body.dump(), "application/json");
        if (!res)
            throw QueryFailed("transport error contacting " + endpoint_.base_url + ": " +
                              httplib::to_string(res.error()));
        if (res->status >= 400 && res->status < 500)
            throw ProviderRejected("provider rejected request: " + res->body, res->status);
        if (res->status != 200)
            throw QueryFailed("provider returned status " + std::to_string(res->status));

        json payload;
        try {
            payload = json::parse(res->body);
        } catch (const json::exception& e) {
            throw QueryFailed(std::string("unparseable provider response: ") + e.what());
        }
        return {extract_score(payload), payload};
    }

private:
    std::string api_key() const {
        if (endpoint_.api_key_env.empty()) return {};
        const char* v = std::getenv(endpoint_.api_key_env.c_str());
        if (v == nullptr)
            throw QueryFailed("environment variable " + endpoint_.api_key_env + " is not set");
        return v;
    }

    double extract_score(const json& payload) const {
        const std::string& attr = endpoint_.hate_attribute;
        try {
            switch (endpoint_.style) {
                case ProviderStyle::perspective:
                    return payload.at("attributeScores").at(attr).at("summaryScore")
                        .at("value").get<double>();
                case ProviderStyle::openai_moderation:
                    return payload.at("results").at(0).at("category_scores").at(attr).get<double>();
                case ProviderStyle::simple:
                    if (payload.contains("score")) return payload.at("score").get<double>();
                    if (payload.contains("scores")) return payload.at("scores").at(attr).get<double>();
                    return payload.at("probs").at(attr).get<double>();
            }
        } catch (const json::exception& e) {
            throw QueryFailed("provider response lacks attribute '" + attr + "': " + e.what());
        }
        throw QueryFailed("unreachable provider style");
    }

    RemoteEndpoint endpoint_;
    std::unique_ptr<httplib::Client> client_;
};

} // namespace hatebench
