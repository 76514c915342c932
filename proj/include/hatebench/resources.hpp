#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hatebench/error.hpp"
#include "hatebench/text.hpp"

namespace hatebench {

// ---------------------------------------------------------------- synonym resource

// The word dictionary behind both the attacks and the interpretation
// probes: per word, a lexical synonym list, embedding-nearest neighbors
// with similarity scores (kept sorted descending), and a POS tag.
class SynonymResource {
public:
    struct Neighbor {
        std::string word;
        double similarity = 0.0;
    };

    void add_synonyms(const std::string& word, const std::string& pos,
                      std::vector<std::string> synonyms) {
        Entry& e = entries_[to_lower(word)];
        if (!pos.empty()) e.pos = pos;
        for (auto& s : synonyms) {
            const std::string lower = to_lower(s);
            if (std::find(e.synonyms.begin(), e.synonyms.end(), lower) == e.synonyms.end())
                e.synonyms.push_back(lower);
        }
    }

    void add_neighbors(const std::string& word, const std::string& pos,
                       std::vector<Neighbor> neighbors) {
        Entry& e = entries_[to_lower(word)];
        if (!pos.empty()) e.pos = pos;
        for (auto& n : neighbors) {
            n.word = to_lower(n.word);
            e.neighbors.push_back(std::move(n));
        }
        std::stable_sort(e.neighbors.begin(), e.neighbors.end(),
                         [](const Neighbor& a, const Neighbor& b) {
                             return a.similarity > b.similarity;
                         });
    }

    bool contains(const std::string& word) const { return entries_.count(to_lower(word)) > 0; }

    std::vector<std::string> synonyms(const std::string& word) const {
        const auto it = entries_.find(to_lower(word));
        return it == entries_.end() ? std::vector<std::string>{} : it->second.synonyms;
    }

    std::vector<Neighbor> neighbors(const std::string& word) const {
        const auto it = entries_.find(to_lower(word));
        return it == entries_.end() ? std::vector<Neighbor>{} : it->second.neighbors;
    }

    std::string pos(const std::string& word) const {
        const auto it = entries_.find(to_lower(word));
        return it == entries_.end() ? std::string{} : it->second.pos;
    }

    // Symmetric lookup used by the METEOR synonym stage.
    bool are_synonyms(const std::string& a, const std::string& b) const {
        const std::string la = to_lower(a), lb = to_lower(b);
        const auto ia = entries_.find(la);
        if (ia != entries_.end() &&
            std::find(ia->second.synonyms.begin(), ia->second.synonyms.end(), lb) !=
                ia->second.synonyms.end())
            return true;
        const auto ib = entries_.find(lb);
        return ib != entries_.end() &&
               std::find(ib->second.synonyms.begin(), ib->second.synonyms.end(), la) !=
                   ib->second.synonyms.end();
    }

    std::size_t size() const { return entries_.size(); }

    // synonyms file:  word <tab> pos <tab> syn1,syn2,...
    void load_synonyms_tsv(const std::filesystem::path& path) {
        for_each_row(path, [this](const std::vector<std::string>& cells) {
            if (cells.size() < 3) throw Error("malformed synonym row");
            add_synonyms(cells[0], cells[1], split_list(cells[2]));
        });
    }

    // neighbors file: word <tab> pos <tab> neigh:sim,neigh:sim,...
    void load_neighbors_tsv(const std::filesystem::path& path) {
        for_each_row(path, [this](const std::vector<std::string>& cells) {
            if (cells.size() < 3) throw Error("malformed neighbor row");
            std::vector<Neighbor> ns;
            for (const auto& item : split_list(cells[2])) {
                const auto colon = item.rfind(':');
                if (colon == std::string::npos) throw Error("neighbor item lacks similarity: " + item);
                ns.push_back({item.substr(0, colon), std::stod(item.substr(colon + 1))});
            }
            add_neighbors(cells[0], cells[1], std::move(ns));
        });
    }

    static SynonymResource load(const std::filesystem::path& data_dir) {
        SynonymResource r;
        r.load_synonyms_tsv(data_dir / "wordnet_synonyms.tsv");
        r.load_neighbors_tsv(data_dir / "embedding_neighbors.tsv");
        return r;
    }

private:
    struct Entry {
        std::string pos;
        std::vector<std::string> synonyms;
        std::vector<Neighbor> neighbors;
    };

    template <typename Fn>
    static void for_each_row(const std::filesystem::path& path, Fn fn) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read resource file " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::vector<std::string> cells;
            std::string cell;
            for (char c : line) {
                if (c == '\t') {
                    cells.push_back(cell);
                    cell.clear();
                } else {
                    cell.push_back(c);
                }
            }
            cells.push_back(cell);
            fn(cells);
        }
    }

    static std::vector<std::string> split_list(const std::string& s) {
        std::vector<std::string> out;
        std::string item;
        for (char c : s) {
            if (c == ',') {
                if (!item.empty()) out.push_back(item);
                item.clear();
            } else {
                item.push_back(c);
            }
        }
        if (!item.empty()) out.push_back(item);
        return out;
    }

    std::unordered_map<std::string, Entry> entries_;
};

// ---------------------------------------------------------------- char tables

// Visually similar replacements per character. File rows extend or
// override the built-ins: char <tab> alt1,alt2
class HomoglyphTable {
public:
    HomoglyphTable() {
        static const std::pair<char, const char*> builtin[] = {
            {'a', "@,\xD0\xB0"}, {'b', "6"},          {'c', "\xD1\x81"},  {'e', "3,\xD0\xB5"},
            {'i', "1,!,\xD1\x96"}, {'l', "1,|"},      {'o', "0,\xD0\xBE"}, {'s', "$,\xD1\x95"},
            {'t', "7"},          {'x', "\xD1\x85"},   {'y', "\xD1\x83"},  {'g', "9"},
            {'u', "\xC3\xBC"},   {'n', "\xD0\xBF"},
        };
        for (const auto& [c, alts] : builtin) table_[c] = split(alts);
    }

    void load_tsv(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read homoglyph table " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos || tab != 1) continue;
            table_[line[0]] = split(line.substr(tab + 1));
        }
    }

    std::vector<std::string> alternatives(char c) const {
        const auto it = table_.find(c);
        return it == table_.end() ? std::vector<std::string>{} : it->second;
    }

private:
    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        std::string item;
        for (char c : s) {
            if (c == ',') {
                out.push_back(item);
                item.clear();
            } else {
                item.push_back(c);
            }
        }
        if (!item.empty()) out.push_back(item);
        return out;
    }

    std::map<char, std::vector<std::string>> table_;
};

// QWERTY adjacency for substitution typos.
class KeyboardTable {
public:
    KeyboardTable() {
        static const std::pair<char, const char*> builtin[] = {
            {'q', "wa"},   {'w', "qes"},  {'e', "wrd"},  {'r', "etf"},  {'t', "ryg"},
            {'y', "tuh"},  {'u', "yij"},  {'i', "uok"},  {'o', "ipl"},  {'p', "ol"},
            {'a', "qsz"},  {'s', "awdx"}, {'d', "sefc"}, {'f', "drgv"}, {'g', "fthb"},
            {'h', "gyjn"}, {'j', "hukm"}, {'k', "jil"},  {'l', "kop"},  {'z', "asx"},
            {'x', "zsdc"}, {'c', "xdfv"}, {'v', "cfgb"}, {'b', "vghn"}, {'n', "bhjm"},
            {'m', "njk"},
        };
        for (const auto& [c, adj] : builtin) table_[c] = adj;
    }

    void load_tsv(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read keyboard table " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto tab = line.find('\t');
            if (tab != 1) continue;
            table_[line[0]] = line.substr(tab + 1);
        }
    }

    std::string adjacent(char c) const {
        const auto it = table_.find(c);
        return it == table_.end() ? std::string{} : it->second;
    }

private:
    std::map<char, std::string> table_;
};

// ---------------------------------------------------------------- identity lexicon

// Lowercased identity phrases (group names, aliases, demonyms); matching
// is span-greedy over word tokens, longest phrase first.
class IdentityLexicon {
public:
    void add(const std::string& phrase) {
        const auto words = word_tokens_lower(phrase);
        if (!words.empty()) {
            phrases_.insert(words);
            max_len_ = std::max(max_len_, words.size());
        }
    }

    void load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read identity lexicon " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line[0] != '#') add(line);
        }
    }

    bool empty() const { return phrases_.empty(); }
    std::size_t max_phrase_len() const { return max_len_; }

    bool contains(const std::vector<std::string>& words) const { return phrases_.count(words) > 0; }

    // Indices of tokens covered by any lexicon phrase.
    std::set<std::size_t> protected_indices(const TokenizedText& tokenized) const {
        std::vector<std::string> lower;
        lower.reserve(tokenized.size());
        for (const auto& t : tokenized.tokens()) lower.push_back(to_lower(t.text));

        std::set<std::size_t> out;
        for (std::size_t i = 0; i < lower.size();) {
            std::size_t matched = 0;
            const std::size_t cap = std::min(max_len_, lower.size() - i);
            for (std::size_t len = cap; len >= 1; --len) {
                std::vector<std::string> span(lower.begin() + static_cast<long>(i),
                                              lower.begin() + static_cast<long>(i + len));
                if (phrases_.count(span)) {
                    matched = len;
                    break;
                }
            }
            if (matched > 0) {
                for (std::size_t k = 0; k < matched; ++k) out.insert(i + k);
                i += matched;
            } else {
                ++i;
            }
        }
        return out;
    }

private:
    std::set<std::vector<std::string>> phrases_;
    std::size_t max_len_ = 0;
};

} // namespace hatebench
