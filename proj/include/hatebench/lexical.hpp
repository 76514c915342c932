#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "hatebench/error.hpp"
#include "hatebench/text.hpp"
#include "hatebench/types.hpp"

namespace hatebench {

// Language-model adapter; absent scorer means perplexity is omitted.
class PerplexityScorer {
public:
    virtual ~PerplexityScorer() = default;
    virtual double perplexity(const std::string& text) = 0;
};

struct LexicalFeatures {
    double coleman_liau = 0.0;
    double type_token_ratio = 0.0;
    std::optional<double> perplexity;
    bool profanity_flag = false;
    std::size_t word_count = 0;
};

// Coleman-Liau = 0.0588*L - 0.296*S - 15.8 with L = letters per 100
// words and S = sentences per 100 words (floored at one sentence).
// TTR tokenizes with Unicode word segmentation, lowercased.
inline LexicalFeatures lexical_features(const std::string& text,
                                        const std::unordered_set<std::string>& profanity_lexicon,
                                        PerplexityScorer* scorer = nullptr) {
    if (text.empty()) throw InvalidInput("lexical_features requires non-empty text");

    LexicalFeatures f;
    const auto tokens = word_tokens_lower(text);
    f.word_count = tokens.size();
    if (tokens.empty()) throw InvalidInput("text has no word tokens");

    std::set<std::string> distinct(tokens.begin(), tokens.end());
    f.type_token_ratio = static_cast<double>(distinct.size()) / static_cast<double>(tokens.size());

    const double words = static_cast<double>(tokens.size());
    const double letters_per_100 = static_cast<double>(count_letters(text)) / words * 100.0;
    const double sentences_per_100 = static_cast<double>(count_sentences(text)) / words * 100.0;
    f.coleman_liau = 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8;

    for (const auto& t : tokens) {
        if (profanity_lexicon.count(t)) {
            f.profanity_flag = true;
            break;
        }
    }
    if (scorer != nullptr) f.perplexity = scorer->perplexity(text);
    return f;
}

// One lowercased token per line; '#' comments allowed.
inline std::unordered_set<std::string> load_profanity_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read profanity lexicon " + path.string());
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') out.insert(to_lower(line));
    return out;
}

// Per-source lexical aggregates over a sample set.
struct LexicalSummary {
    std::string group;
    std::size_t samples = 0;
    double mean_coleman_liau = 0.0;
    double mean_type_token_ratio = 0.0;
    double profanity_rate = 0.0;
    double mean_word_count = 0.0;
    std::optional<double> mean_perplexity;
};

inline std::vector<LexicalSummary> lexical_summary_by_source(
    const std::vector<Sample>& samples, const std::unordered_set<std::string>& profanity_lexicon,
    PerplexityScorer* scorer = nullptr) {
    struct Acc {
        std::size_t n = 0;
        double cli = 0.0, ttr = 0.0, words = 0.0, ppl = 0.0;
        std::size_t profane = 0, ppl_n = 0;
    };
    std::map<std::string, Acc> accs;
    for (const auto& s : samples) {
        if (s.text.empty()) continue;
        LexicalFeatures f;
        try {
            f = lexical_features(s.text, profanity_lexicon, scorer);
        } catch (const InvalidInput&) {
            continue; // texts with no word tokens carry no lexical signal
        }
        Acc& a = accs[s.source.str()];
        ++a.n;
        a.cli += f.coleman_liau;
        a.ttr += f.type_token_ratio;
        a.words += static_cast<double>(f.word_count);
        if (f.profanity_flag) ++a.profane;
        if (f.perplexity) {
            a.ppl += *f.perplexity;
            ++a.ppl_n;
        }
    }
    std::vector<LexicalSummary> out;
    for (const auto& [group, a] : accs) {
        LexicalSummary s;
        s.group = group;
        s.samples = a.n;
        const double n = static_cast<double>(a.n);
        s.mean_coleman_liau = a.cli / n;
        s.mean_type_token_ratio = a.ttr / n;
        s.profanity_rate = static_cast<double>(a.profane) / n;
        s.mean_word_count = a.words / n;
        if (a.ppl_n > 0) s.mean_perplexity = a.ppl / static_cast<double>(a.ppl_n);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace hatebench
