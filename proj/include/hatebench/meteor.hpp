#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hatebench/resources.hpp"
#include "hatebench/text.hpp"

namespace hatebench {

// ---------------------------------------------------------------- porter stemmer

// Porter (1980), original rule set. Operates on lowercase ASCII words;
// anything else passes through unchanged.
class PorterStemmer {
public:
    std::string stem(const std::string& word) {
        if (word.size() <= 2) return word;
        for (char c : word)
            if (c < 'a' || c > 'z') return word;
        b_ = word;
        step1ab();
        step1c();
        step2();
        step3();
        step4();
        step5();
        return b_;
    }

private:
    std::string b_;

    bool is_cons(std::size_t i) const {
        const char c = b_[i];
        if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return false;
        if (c == 'y') return i == 0 ? true : !is_cons(i - 1);
        return true;
    }

    // measure of b_[0..j]: number of VC sequences
    int measure(long j) const {
        int n = 0;
        long i = 0;
        for (;;) {
            if (i > j) return n;
            if (!is_cons(static_cast<std::size_t>(i))) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > j) return n;
                if (is_cons(static_cast<std::size_t>(i))) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > j) return n;
                if (!is_cons(static_cast<std::size_t>(i))) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem(long j) const {
        for (long i = 0; i <= j; ++i)
            if (!is_cons(static_cast<std::size_t>(i))) return true;
        return false;
    }

    bool double_cons(long j) const {
        if (j < 1) return false;
        if (b_[static_cast<std::size_t>(j)] != b_[static_cast<std::size_t>(j - 1)]) return false;
        return is_cons(static_cast<std::size_t>(j));
    }

    bool cvc(long i) const {
        if (i < 2 || !is_cons(static_cast<std::size_t>(i)) ||
            is_cons(static_cast<std::size_t>(i - 1)) || !is_cons(static_cast<std::size_t>(i - 2)))
            return false;
        const char c = b_[static_cast<std::size_t>(i)];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(const char* s) const {
        const std::size_t len = std::char_traits<char>::length(s);
        if (len > b_.size()) return false;
        return b_.compare(b_.size() - len, len, s) == 0;
    }

    void set_suffix(const char* s, std::size_t removed) {
        b_.resize(b_.size() - removed);
        b_.append(s);
    }

    // replace suffix when the measure of the remaining stem is positive
    bool replace_m0(const char* suffix, const char* replacement) {
        if (!ends(suffix)) return false;
        const std::size_t len = std::char_traits<char>::length(suffix);
        if (measure(static_cast<long>(b_.size() - len) - 1) > 0) set_suffix(replacement, len);
        return true;
    }

    void step1ab() {
        if (ends("sses")) set_suffix("ss", 4);
        else if (ends("ies")) set_suffix("i", 3);
        else if (!ends("ss") && ends("s")) b_.pop_back();

        bool flag = false;
        if (ends("eed")) {
            if (measure(static_cast<long>(b_.size()) - 4) > 0) b_.pop_back();
        } else if (ends("ed") && vowel_in_stem(static_cast<long>(b_.size()) - 3)) {
            b_.resize(b_.size() - 2);
            flag = true;
        } else if (ends("ing") && vowel_in_stem(static_cast<long>(b_.size()) - 4)) {
            b_.resize(b_.size() - 3);
            flag = true;
        }
        if (flag) {
            if (ends("at")) set_suffix("ate", 2);
            else if (ends("bl")) set_suffix("ble", 2);
            else if (ends("iz")) set_suffix("ize", 2);
            else if (double_cons(static_cast<long>(b_.size()) - 1)) {
                const char c = b_.back();
                if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
            } else if (measure(static_cast<long>(b_.size()) - 1) == 1 &&
                       cvc(static_cast<long>(b_.size()) - 1)) {
                b_.push_back('e');
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem(static_cast<long>(b_.size()) - 2)) b_.back() = 'i';
    }

    void step2() {
        static const std::pair<const char*, const char*> rules[] = {
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
        };
        for (const auto& [suffix, repl] : rules)
            if (replace_m0(suffix, repl)) return;
    }

    void step3() {
        static const std::pair<const char*, const char*> rules[] = {
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        };
        for (const auto& [suffix, repl] : rules)
            if (replace_m0(suffix, repl)) return;
    }

    void step4() {
        static const char* first[] = {"al",  "ance", "ence",  "er",   "ic",  "able",
                                      "ible", "ant",  "ement", "ment", "ent"};
        for (const char* suffix : first) {
            if (ends(suffix)) {
                const long j = static_cast<long>(b_.size()) -
                               static_cast<long>(std::char_traits<char>::length(suffix)) - 1;
                if (measure(j) > 1) b_.resize(static_cast<std::size_t>(j + 1));
                return;
            }
        }
        if (ends("ion")) {
            const long j = static_cast<long>(b_.size()) - 4;
            if (j >= 0 && (b_[static_cast<std::size_t>(j)] == 's' ||
                           b_[static_cast<std::size_t>(j)] == 't') &&
                measure(j) > 1)
                b_.resize(static_cast<std::size_t>(j + 1));
            return;
        }
        static const char* second[] = {"ou", "ism", "ate", "iti", "ous", "ive", "ize"};
        for (const char* suffix : second) {
            if (ends(suffix)) {
                const long j = static_cast<long>(b_.size()) -
                               static_cast<long>(std::char_traits<char>::length(suffix)) - 1;
                if (measure(j) > 1) b_.resize(static_cast<std::size_t>(j + 1));
                return;
            }
        }
    }

    void step5() {
        if (!b_.empty() && b_.back() == 'e') {
            const int a = measure(static_cast<long>(b_.size()) - 2);
            if (a > 1 || (a == 1 && !cvc(static_cast<long>(b_.size()) - 2))) b_.pop_back();
        }
        if (b_.size() >= 2 && b_.back() == 'l' && b_[b_.size() - 2] == 'l' &&
            measure(static_cast<long>(b_.size()) - 1) > 1)
            b_.pop_back();
    }
};

inline std::string porter_stem(const std::string& word) {
    static thread_local PorterStemmer stemmer;
    return stemmer.stem(word);
}

// ---------------------------------------------------------------- meteor

// Unigram METEOR with exact, stem and synonym stages. Each stage pairs
// still-unmatched candidate tokens with the first unmatched compatible
// reference token (left to right). With m matches over c candidate and
// r reference tokens:
//   P = m/c, R = m/r, F = 10PR / (R + 9P)
//   penalty = 0.5 * (chunks / m)^3
//   score = F * (1 - penalty)
// where chunks counts maximal runs of pairs adjacent in both texts.
inline double meteor_score(const std::string& reference, const std::string& candidate,
                           const SynonymResource* synonyms = nullptr) {
    const std::vector<std::string> ref = word_tokens_lower(reference);
    const std::vector<std::string> cand = word_tokens_lower(candidate);
    if (ref.empty() || cand.empty()) return 0.0;

    std::vector<long> match(cand.size(), -1); // candidate idx -> reference idx
    std::vector<bool> ref_used(ref.size(), false);

    auto run_stage = [&](auto&& compatible) {
        for (std::size_t ci = 0; ci < cand.size(); ++ci) {
            if (match[ci] >= 0) continue;
            for (std::size_t ri = 0; ri < ref.size(); ++ri) {
                if (ref_used[ri]) continue;
                if (compatible(cand[ci], ref[ri])) {
                    match[ci] = static_cast<long>(ri);
                    ref_used[ri] = true;
                    break;
                }
            }
        }
    };

    run_stage([](const std::string& c, const std::string& r) { return c == r; });
    run_stage([](const std::string& c, const std::string& r) {
        return porter_stem(c) == porter_stem(r);
    });
    if (synonyms != nullptr) {
        run_stage([&](const std::string& c, const std::string& r) {
            return synonyms->are_synonyms(c, r);
        });
    }

    std::size_t m = 0;
    for (long v : match)
        if (v >= 0) ++m;
    if (m == 0) return 0.0;

    const double precision = static_cast<double>(m) / static_cast<double>(cand.size());
    const double recall = static_cast<double>(m) / static_cast<double>(ref.size());
    const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);

    std::size_t chunks = 0;
    long prev_ci = -2, prev_ri = -2;
    for (std::size_t ci = 0; ci < cand.size(); ++ci) {
        if (match[ci] < 0) continue;
        if (static_cast<long>(ci) != prev_ci + 1 || match[ci] != prev_ri + 1) ++chunks;
        prev_ci = static_cast<long>(ci);
        prev_ri = match[ci];
    }

    const double penalty =
        0.5 * std::pow(static_cast<double>(chunks) / static_cast<double>(m), 3.0);
    return fmean * (1.0 - penalty);
}

} // namespace hatebench
