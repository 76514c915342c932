#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "hatebench/error.hpp"
#include "hatebench/hash.hpp"
#include "hatebench/text.hpp"
#include "hatebench/types.hpp"

namespace hatebench {

using json = nlohmann::json;

// ---------------------------------------------------------------- verdicts

struct DetectorVerdict {
    std::string detector_id;
    std::string text_hash; // sha256 of NFC-normalized text
    double score = 0.0;    // P(hate | text) in [0,1]
    Label label = Label::non_hate;
    Micros latency{0};
    bool from_cache = false;
    json raw; // provider payload, verbatim for drift audits
};

enum class DetectorKind { remote_api, local_model, mock };

struct DetectorConfig {
    std::string detector_id;
    DetectorKind kind = DetectorKind::mock;
    std::string hate_attribute; // provider attribute mapped to hate
    double threshold = 0.5;
    double rate_limit_qps = 0.0; // 0 = unlimited
    bool cache_enabled = true;
    int max_retries = 3;
    std::chrono::milliseconds retry_base_delay{100};
    std::chrono::milliseconds timeout{10000};
};

// ---------------------------------------------------------------- providers

struct ProviderResponse {
    double score = 0.0;
    json raw;
};

// One provider round-trip. Implementations throw ProviderRejected for
// non-retriable responses and QueryFailed/Error for retriable ones.
class Detector {
public:
    virtual ~Detector() = default;
    virtual ProviderResponse score(const std::string& text) = 0;
};

// Deterministic token-rule detector with an internal call counter, used
// as the instrumented stand-in for a provider in tests and dry runs.
class MockDetector : public Detector {
public:
    MockDetector(std::unordered_map<std::string, double> keyword_scores, double default_score)
        : keyword_scores_(std::move(keyword_scores)), default_score_(default_score) {}

    ProviderResponse score(const std::string& text) override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        if (fail_every_ > 0 &&
            calls_.load(std::memory_order_relaxed) % fail_every_ == 0)
            throw QueryFailed("mock transient failure");
        double best = default_score_;
        bool matched = false;
        for (const auto& tok : word_tokens_lower(text)) {
            const auto it = keyword_scores_.find(tok);
            if (it != keyword_scores_.end()) {
                best = matched ? std::max(best, it->second) : it->second;
                matched = true;
            }
        }
        return {best, json{{"provider", "mock"}, {"matched", matched}}};
    }

    std::uint64_t call_count() const { return calls_.load(std::memory_order_relaxed); }
    void fail_every(std::uint64_t n) { fail_every_ = n; }

private:
    std::unordered_map<std::string, double> keyword_scores_;
    double default_score_;
    std::atomic<std::uint64_t> calls_{0};
    std::uint64_t fail_every_ = 0;
};

// ---------------------------------------------------------------- ledger

struct LedgerSnapshot {
    std::uint64_t remote_calls = 0;
    std::uint64_t cache_hits = 0;
    Micros wall_time{0};
};

// Monotone counters per (detector, campaign). remote_calls increments
// exactly once per non-cached provider round-trip.
class QueryLedger {
public:
    void record_remote(const std::string& detector_id, const std::string& campaign_id,
                       Micros latency) {
        Entry& e = entry(detector_id, campaign_id);
        e.remote_calls.fetch_add(1, std::memory_order_relaxed);
        e.wall_time_us.fetch_add(latency.count(), std::memory_order_relaxed);
    }

    void record_cache_hit(const std::string& detector_id, const std::string& campaign_id) {
        entry(detector_id, campaign_id).cache_hits.fetch_add(1, std::memory_order_relaxed);
    }

    LedgerSnapshot snapshot(const std::string& detector_id, const std::string& campaign_id) const {
        std::lock_guard lock(mutex_);
        const auto it = entries_.find(key(detector_id, campaign_id));
        if (it == entries_.end()) return {};
        return {it->second->remote_calls.load(), it->second->cache_hits.load(),
                Micros(it->second->wall_time_us.load())};
    }

    LedgerSnapshot total(const std::string& detector_id) const {
        std::lock_guard lock(mutex_);
        LedgerSnapshot s;
        for (const auto& [k, e] : entries_) {
            if (k.rfind(detector_id + "\x1f", 0) == 0) {
                s.remote_calls += e->remote_calls.load();
                s.cache_hits += e->cache_hits.load();
                s.wall_time += Micros(e->wall_time_us.load());
            }
        }
        return s;
    }

private:
    struct Entry {
        std::atomic<std::uint64_t> remote_calls{0};
        std::atomic<std::uint64_t> cache_hits{0};
        std::atomic<std::int64_t> wall_time_us{0};
    };

    static std::string key(const std::string& d, const std::string& c) { return d + "\x1f" + c; }

    Entry& entry(const std::string& d, const std::string& c) {
        std::lock_guard lock(mutex_);
        auto& slot = entries_[key(d, c)];
        if (!slot) slot = std::make_unique<Entry>();
        return *slot;
    }

    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::unique_ptr<Entry>> entries_;
};

// ---------------------------------------------------------------- rate limiter

class TokenBucket {
public:
    explicit TokenBucket(double qps) : qps_(qps), tokens_(qps > 0 ? 1.0 : 0.0) {}

    // Blocks until a token is available. qps <= 0 means unlimited.
    void acquire() {
        if (qps_ <= 0.0) return;
        std::unique_lock lock(mutex_);
        refill();
        while (tokens_ < 1.0) {
            const double missing = 1.0 - tokens_;
            const auto wait = std::chrono::duration<double>(missing / qps_);
            cv_.wait_for(lock, wait);
            refill();
        }
        tokens_ -= 1.0;
    }

private:
    void refill() {
        const auto now = Clock::now();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        tokens_ = std::min(burst_, tokens_ + elapsed * qps_);
    }

    double qps_;
    double tokens_;
    double burst_ = 1.0;
    Clock::time_point last_ = Clock::now();
    std::mutex mutex_;
    std::condition_variable cv_;
};

// ---------------------------------------------------------------- cache

// Content-addressed verdict cache: in-memory map with an optional
// directory of JSON records behind it. Stores scores, not labels, so a
// threshold change re-labels without a remote call.
class VerdictCache {
public:
    explicit VerdictCache(std::optional<std::filesystem::path> dir = std::nullopt)
        : dir_(std::move(dir)) {
        if (dir_) std::filesystem::create_directories(*dir_);
    }

    struct Record {
        double score = 0.0;
        json raw;
    };

    std::optional<Record> lookup(const std::string& key) const {
        {
            std::lock_guard lock(mutex_);
            const auto it = memory_.find(key);
            if (it != memory_.end()) return it->second;
        }
        if (dir_) {
            const auto path = *dir_ / (key + ".json");
            std::ifstream in(path);
            if (in) {
                try {
                    const json j = json::parse(in);
                    Record rec{j.at("score").get<double>(), j.value("raw", json{})};
                    std::lock_guard lock(mutex_);
                    memory_[key] = rec;
                    return rec;
                } catch (const std::exception&) {
                    return std::nullopt;
                }
            }
        }
        return std::nullopt;
    }

    void store(const std::string& key, const Record& rec) {
        {
            std::lock_guard lock(mutex_);
            memory_[key] = rec;
        }
        if (dir_) {
            const json j{{"score", rec.score}, {"raw", rec.raw}};
            std::ofstream out(*dir_ / (key + ".json"));
            out << j.dump();
        }
    }

private:
    std::optional<std::filesystem::path> dir_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, Record> memory_;
};

// ---------------------------------------------------------------- gateway

// Uniform black-box contract over every detector. Thread-safe: many
// attack workers may query one detector concurrently.
class DetectorGateway {
public:
    DetectorGateway() {
        if (const char* env = std::getenv("HATEBENCH_CACHE_DIR")) default_cache_dir_ = env;
    }

    void register_detector(DetectorConfig config, std::unique_ptr<Detector> impl) {
        if (config.detector_id.empty()) throw InvalidInput("detector_id must be non-empty");
        if (config.threshold <= 0.0 || config.threshold >= 1.0)
            throw ThresholdError("threshold must lie in (0,1)");
        std::lock_guard lock(mutex_);
        if (slots_.count(config.detector_id))
            throw DuplicateId("detector already registered: " + config.detector_id);
        auto slot = std::make_unique<Slot>();
        slot->impl = std::move(impl);
        slot->threshold.store(config.threshold);
        slot->limiter = std::make_unique<TokenBucket>(config.rate_limit_qps);
        std::optional<std::filesystem::path> cache_dir;
        if (config.cache_enabled && !default_cache_dir_.empty())
            cache_dir = std::filesystem::path(default_cache_dir_) / config.detector_id;
        slot->cache = std::make_unique<VerdictCache>(cache_dir);
        slot->config = std::move(config);
        slots_[slot->config.detector_id] = std::move(slot);
    }

    bool has_detector(const std::string& id) const {
        std::lock_guard lock(mutex_);
        return slots_.count(id) > 0;
    }

    std::vector<std::string> detector_ids() const {
        std::lock_guard lock(mutex_);
        std::vector<std::string> ids;
        for (const auto& [id, slot] : slots_) ids.push_back(id);
        return ids;
    }

    void set_campaign(std::string campaign_id) {
        std::lock_guard lock(mutex_);
        campaign_ = std::move(campaign_id);
    }

    const std::string& campaign() const { return campaign_; }

    // 0 < t < 1. Later labels are recomputed from stored scores; cached
    // scores themselves are untouched.
    void set_threshold(const std::string& detector_id, double t) {
        if (t <= 0.0 || t >= 1.0) throw ThresholdError("threshold must lie in (0,1)");
        slot(detector_id).threshold.store(t);
    }

    double threshold(const std::string& detector_id) const {
        return const_cast<DetectorGateway*>(this)->slot(detector_id).threshold.load();
    }

    DetectorVerdict classify(const std::string& detector_id, const std::string& text) {
        if (text.empty()) throw InvalidInput("classify requires non-empty text");
        Slot& s = slot(detector_id);

        const std::string normalized = nfc_normalize(text);
        const std::string text_hash = sha256_hex(normalized);
        const std::string cache_key = sha256_hex(detector_id + "\x1f" + normalized);

        if (s.config.cache_enabled) {
            if (const auto hit = s.cache->lookup(cache_key)) {
                ledger_.record_cache_hit(detector_id, campaign_);
                return make_verdict(s, detector_id, text_hash, hit->score, hit->raw, Micros{0},
                                    /*from_cache=*/true);
            }
        }

        s.limiter->acquire();

        ProviderResponse resp;
        Micros latency{0};
        int attempt = 0;
        for (;;) {
            const auto t0 = Clock::now();
            try {
                resp = s.impl->score(text);
                latency = std::chrono::duration_cast<Micros>(Clock::now() - t0);
                break;
            } catch (const ProviderRejected&) {
                throw; // 4xx: not retriable
            } catch (const std::exception& e) {
                if (++attempt > s.config.max_retries)
                    throw QueryFailed("detector " + detector_id + " failed after " +
                                      std::to_string(attempt) + " attempts: " + e.what());
                std::this_thread::sleep_for(s.config.retry_base_delay * (1 << (attempt - 1)));
            }
        }

        if (resp.score < 0.0 || resp.score > 1.0)
            throw QueryFailed("detector " + detector_id + " returned score outside [0,1]");

        ledger_.record_remote(detector_id, campaign_, latency);
        if (s.config.cache_enabled) s.cache->store(cache_key, {resp.score, resp.raw});
        return make_verdict(s, detector_id, text_hash, resp.score, resp.raw, latency,
                            /*from_cache=*/false);
    }

    struct BatchItem {
        std::optional<DetectorVerdict> verdict;
        std::optional<std::string> error;
    };

    // Order-preserving; per-item failures never abort the batch.
    std::vector<BatchItem> classify_batch(const std::string& detector_id,
                                          const std::vector<std::string>& texts) {
        std::vector<BatchItem> out;
        out.reserve(texts.size());
        for (const auto& t : texts) {
            BatchItem item;
            try {
                item.verdict = classify(detector_id, t);
            } catch (const std::exception& e) {
                item.error = e.what();
            }
            out.push_back(std::move(item));
        }
        return out;
    }

    QueryLedger& ledger() { return ledger_; }
    const QueryLedger& ledger() const { return ledger_; }

    const DetectorConfig& config(const std::string& detector_id) {
        return slot(detector_id).config;
    }

private:
    struct Slot {
        DetectorConfig config;
        std::unique_ptr<Detector> impl;
        std::atomic<double> threshold{0.5};
        std::unique_ptr<TokenBucket> limiter;
        std::unique_ptr<VerdictCache> cache;
    };

    Slot& slot(const std::string& id) {
        std::lock_guard lock(mutex_);
        const auto it = slots_.find(id);
        if (it == slots_.end()) throw UnknownDetector("detector not registered: " + id);
        return *it->second;
    }

    DetectorVerdict make_verdict(Slot& s, const std::string& detector_id,
                                 const std::string& text_hash, double score, json raw,
                                 Micros latency, bool from_cache) {
        DetectorVerdict v;
        v.detector_id = detector_id;
        v.text_hash = text_hash;
        v.score = score;
        v.label = score >= s.threshold.load() ? Label::hate : Label::non_hate;
        v.latency = latency;
        v.from_cache = from_cache;
        v.raw = std::move(raw);
        return v;
    }

    mutable std::mutex mutex_;
    std::map<std::string, std::unique_ptr<Slot>> slots_;
    QueryLedger ledger_;
    std::string campaign_ = "default";
    std::string default_cache_dir_;
};

} // namespace hatebench
