#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hatebench/detector.hpp"
#include "hatebench/error.hpp"
#include "hatebench/resources.hpp"
#include "hatebench/text.hpp"

namespace hatebench {

inline constexpr std::string_view kDefaultPlaceholder = "[UNK]";

// Per-token candidate provider for the delta stage. The default adapter
// reuses the attack synonym resource so interpretation and attacks share
// one vocabulary.
class ReplacementSource {
public:
    virtual ~ReplacementSource() = default;
    virtual std::vector<std::string> candidates(const std::string& token) const = 0;
};

class SynonymReplacementSource : public ReplacementSource {
public:
    SynonymReplacementSource(const SynonymResource& resource, std::size_t max_candidates = 8)
        : resource_(resource), max_candidates_(max_candidates) {}

    std::vector<std::string> candidates(const std::string& token) const override {
        std::vector<std::string> out = resource_.synonyms(token);
        for (const auto& n : resource_.neighbors(token)) {
            if (std::find(out.begin(), out.end(), n.word) == out.end()) out.push_back(n.word);
        }
        if (out.size() > max_candidates_) out.resize(max_candidates_);
        return out;
    }

private:
    const SynonymResource& resource_;
    std::size_t max_candidates_;
};

class NoReplacements : public ReplacementSource {
public:
    std::vector<std::string> candidates(const std::string&) const override { return {}; }
};

struct SaliencyMap {
    std::string text;
    std::vector<std::string> tokens;
    std::vector<double> loo_scores;   // score(original) - score(token -> placeholder)
    std::vector<double> normalized;   // softmax over loo_scores, sums to 1
    std::vector<double> delta_scores; // max |output change| over candidate replacements
    std::vector<double> final;        // normalized * delta
    double original_score = 0.0;
};

inline std::vector<double> softmax(const std::vector<double>& xs) {
    const double mx = *std::max_element(xs.begin(), xs.end());
    std::vector<double> out(xs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] = std::exp(xs[i] - mx);
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

// Leave-one-out saliency against a black-box detector. Stage one issues
// exactly |tokens| masked queries plus one original query; stage two
// issues one query per replacement candidate. A detector failure
// mid-map propagates; no partial maps are returned.
inline SaliencyMap saliency_map(DetectorGateway& gateway, const std::string& detector_id,
                                const std::string& text, const ReplacementSource& replacements,
                                std::string placeholder = std::string(kDefaultPlaceholder)) {
    const TokenizedText tokenized = tokenize(text);
    if (tokenized.size() == 0) throw InvalidInput("saliency requires at least one token");

    SaliencyMap map;
    map.text = text;
    map.original_score = gateway.classify(detector_id, text).score;

    for (std::size_t i = 0; i < tokenized.size(); ++i) {
        map.tokens.push_back(tokenized[i].text);
        const std::string masked = tokenized.rebuild({{i, placeholder}});
        const double masked_score = gateway.classify(detector_id, masked).score;
        map.loo_scores.push_back(map.original_score - masked_score);
    }

    map.normalized = softmax(map.loo_scores);

    for (std::size_t i = 0; i < tokenized.size(); ++i) {
        double delta = 0.0;
        for (const auto& candidate : replacements.candidates(to_lower(tokenized[i].text))) {
            const std::string replaced = tokenized.rebuild({{i, candidate}});
            const double replaced_score = gateway.classify(detector_id, replaced).score;
            delta = std::max(delta, std::abs(map.original_score - replaced_score));
        }
        map.delta_scores.push_back(delta);
    }

    for (std::size_t i = 0; i < tokenized.size(); ++i)
        map.final.push_back(map.normalized[i] * map.delta_scores[i]);
    return map;
}

// ---------------------------------------------------------------- aggregation

struct InfluentialWord {
    std::string word;
    double mean_final = 0.0;
    std::size_t count = 0;
};

// Mean final score per lowercased word; words below the corpus frequency
// floor are dropped.
inline std::vector<InfluentialWord> top_influential_words(const std::vector<SaliencyMap>& maps,
                                                          std::size_t min_count = 20,
                                                          std::size_t top_k = 15) {
    if (maps.empty()) throw InvalidInput("top_influential_words requires at least one map");
    struct Acc {
        double sum = 0.0;
        std::size_t count = 0;
    };
    std::map<std::string, Acc> acc;
    for (const auto& m : maps) {
        for (std::size_t i = 0; i < m.tokens.size(); ++i) {
            Acc& a = acc[to_lower(m.tokens[i])];
            a.sum += m.final[i];
            ++a.count;
        }
    }
    std::vector<InfluentialWord> out;
    for (const auto& [word, a] : acc) {
        if (a.count < min_count) continue;
        out.push_back({word, a.sum / static_cast<double>(a.count), a.count});
    }
    std::stable_sort(out.begin(), out.end(), [](const InfluentialWord& a, const InfluentialWord& b) {
        if (a.mean_final != b.mean_final) return a.mean_final > b.mean_final;
        return a.word < b.word;
    });
    if (out.size() > top_k) out.resize(top_k);
    return out;
}

// ---------------------------------------------------------------- export

inline json to_json(const SaliencyMap& m) {
    return json{{"text", m.text},
                {"tokens", m.tokens},
                {"loo_scores", m.loo_scores},
                {"normalized", m.normalized},
                {"delta_scores", m.delta_scores},
                {"final", m.final},
                {"original_score", m.original_score}};
}

// Static heat-map file; token background opacity follows the final score.
inline void write_saliency_html(const std::vector<SaliencyMap>& maps,
                                const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "<!doctype html><html><head><meta charset=\"utf-8\"><style>\n"
           "body{font-family:sans-serif;margin:2em}span.tok{padding:2px;margin:1px;"
           "border-radius:3px;display:inline-block}</style></head><body>\n";
    for (const auto& m : maps) {
        double mx = 0.0;
        for (double f : m.final) mx = std::max(mx, f);
        out << "<p>";
        for (std::size_t i = 0; i < m.tokens.size(); ++i) {
            const double alpha = mx > 0.0 ? m.final[i] / mx : 0.0;
            out << "<span class=\"tok\" style=\"background:rgba(220,40,40," << alpha << ")\" title=\""
                << m.final[i] << "\">";
            for (char c : m.tokens[i]) {
                if (c == '<') out << "&lt;";
                else if (c == '&') out << "&amp;";
                else out << c;
            }
            out << "</span> ";
        }
        out << "</p>\n";
    }
    out << "</body></html>\n";
}

} // namespace hatebench
