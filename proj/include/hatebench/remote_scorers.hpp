#pragma once

#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hatebench/error.hpp"
#include "hatebench/lexical.hpp"
#include "hatebench/quality.hpp"

namespace hatebench {

// Inference-server adapters for the heavyweight quality scorers: a
// sentence-embedding service for encoder similarity and a language-model
// service for perplexity. Both speak the bare JSON style:
//   POST <path> {"text": ...} -> {"embedding": [...]} / {"perplexity": x}

class RemoteSentenceEncoder : public SentenceEncoder {
public:
    RemoteSentenceEncoder(const std::string& base_url, std::string path,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(30000))
        : path_(std::move(path)), client_(std::make_unique<httplib::Client>(base_url)) {
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout).count();
        client_->set_read_timeout(secs > 0 ? secs : 1, 0);
    }

    std::vector<float> encode(const std::string& text) override {
        auto res = client_->Post(path_, json{{"text", text}}.dump(), "application/json");
        if (!res || res->status != 200)
            throw QueryFailed("encoder endpoint failed: " +
                              (res ? std::to_string(res->status) : httplib::to_string(res.error())));
        try {
            return json::parse(res->body).at("embedding").get<std::vector<float>>();
        } catch (const json::exception& e) {
            throw QueryFailed(std::string("unparseable encoder response: ") + e.what());
        }
    }

private:
    std::string path_;
    std::unique_ptr<httplib::Client> client_;
};

class RemotePerplexityScorer : public PerplexityScorer {
public:
    RemotePerplexityScorer(const std::string& base_url, std::string path,
                           std::chrono::milliseconds timeout = std::chrono::milliseconds(30000))
        : path_(std::move(path)), client_(std::make_unique<httplib::Client>(base_url)) {
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout).count();
        client_->set_read_timeout(secs > 0 ? secs : 1, 0);
    }

    double perplexity(const std::string& text) override {
        auto res = client_->Post(path_, json{{"text", text}}.dump(), "application/json");
        if (!res || res->status != 200)
            throw QueryFailed("perplexity endpoint failed: " +
                              (res ? std::to_string(res->status) : httplib::to_string(res.error())));
        try {
            return json::parse(res->body).at("perplexity").get<double>();
        } catch (const json::exception& e) {
            throw QueryFailed(std::string("unparseable perplexity response: ") + e.what());
        }
    }

private:
    std::string path_;
    std::unique_ptr<httplib::Client> client_;
};

} // namespace hatebench
