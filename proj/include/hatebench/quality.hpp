#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hatebench/error.hpp"
#include "hatebench/lexical.hpp"
#include "hatebench/meteor.hpp"
#include "hatebench/rng.hpp"
#include "hatebench/text.hpp"

namespace hatebench {

// ---------------------------------------------------------------- encoders

class SentenceEncoder {
public:
    virtual ~SentenceEncoder() = default;
    virtual std::vector<float> encode(const std::string& text) = 0;
};

inline double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size() || a.empty()) throw InvalidInput("embedding dimensions differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Deterministic hashed word+bigram TF embedding. A lightweight stand-in
// where no sentence-encoder service is configured; similar texts map to
// similar sparse profiles.
class HashedNgramEncoder : public SentenceEncoder {
public:
    explicit HashedNgramEncoder(std::size_t dim = 512) : dim_(dim) {}

    std::vector<float> encode(const std::string& text) override {
        std::vector<float> v(dim_, 0.0f);
        const auto words = word_tokens_lower(text);
        for (std::size_t i = 0; i < words.size(); ++i) {
            v[fnv1a(words[i]) % dim_] += 1.0f;
            if (i + 1 < words.size()) v[fnv1a(words[i] + " " + words[i + 1]) % dim_] += 0.5f;
        }
        return v;
    }

private:
    std::size_t dim_;
};

// ---------------------------------------------------------------- wmr

// Number of original tokens not preserved under an LCS alignment of the
// two token sequences, over the original token count.
inline double word_modification_rate(const std::string& original, const std::string& modified) {
    const auto a = word_tokens_lower(original);
    const auto b = word_tokens_lower(modified);
    if (a.empty()) throw InvalidInput("wmr requires non-empty original text");

    std::vector<std::vector<std::uint32_t>> lcs(a.size() + 1,
                                                std::vector<std::uint32_t>(b.size() + 1, 0));
    for (std::size_t i = a.size(); i-- > 0;) {
        for (std::size_t j = b.size(); j-- > 0;) {
            lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1
                                     : std::max(lcs[i + 1][j], lcs[i][j + 1]);
        }
    }
    const std::size_t preserved = lcs[0][0];
    return static_cast<double>(a.size() - preserved) / static_cast<double>(a.size());
}

// ---------------------------------------------------------------- bundle

struct QualityMetrics {
    double wmr = 0.0;
    double meteor = 0.0;
    std::optional<double> use_sim; // absent without an encoder
    std::optional<double> fluency; // absent without a perplexity scorer
};

struct QualityContext {
    SentenceEncoder* encoder = nullptr;
    PerplexityScorer* perplexity = nullptr;
    const SynonymResource* synonyms = nullptr;
};

inline QualityMetrics quality_metrics(const std::string& original, const std::string& adversarial,
                                      const QualityContext& ctx = {}) {
    if (original.empty() || adversarial.empty())
        throw InvalidInput("quality metrics require non-empty texts");
    QualityMetrics q;
    q.wmr = word_modification_rate(original, adversarial);
    q.meteor = meteor_score(original, adversarial, ctx.synonyms);
    if (ctx.encoder != nullptr)
        q.use_sim = cosine_similarity(ctx.encoder->encode(original), ctx.encoder->encode(adversarial));
    if (ctx.perplexity != nullptr) q.fluency = ctx.perplexity->perplexity(adversarial);
    return q;
}

} // namespace hatebench
