#pragma once

#include <cstring>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/ubrk.h>
#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utext.h>

#include "hatebench/error.hpp"

namespace hatebench {

namespace detail {

inline void icu_check(UErrorCode status, const char* what) {
    if (U_FAILURE(status)) throw Error(std::string(what) + ": " + u_errorName(status));
}

inline std::u16string to_utf16(std::string_view utf8) {
    std::u16string out(utf8.size() + 1, u'\0');
    UErrorCode status = U_ZERO_ERROR;
    int32_t len = 0;
    u_strFromUTF8(out.data(), static_cast<int32_t>(out.size()), &len, utf8.data(),
                  static_cast<int32_t>(utf8.size()), &status);
    icu_check(status, "utf8 -> utf16");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

inline std::string to_utf8(const std::u16string& utf16) {
    std::string out(utf16.size() * 4 + 1, '\0');
    UErrorCode status = U_ZERO_ERROR;
    int32_t len = 0;
    u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &len, utf16.data(),
                static_cast<int32_t>(utf16.size()), &status);
    icu_check(status, "utf16 -> utf8");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

} // namespace detail

// Canonical composition; cache keys hash this form. No case folding:
// adversarial variants that differ by characters must not collapse.
inline std::string nfc_normalize(std::string_view text) {
    UErrorCode status = U_ZERO_ERROR;
    const UNormalizer2* nfc = unorm2_getNFCInstance(&status);
    detail::icu_check(status, "nfc instance");
    const std::u16string in = detail::to_utf16(text);
    std::u16string out(in.size() * 2 + 16, u'\0');
    const int32_t len = unorm2_normalize(nfc, in.data(), static_cast<int32_t>(in.size()),
                                         out.data(), static_cast<int32_t>(out.size()), &status);
    detail::icu_check(status, "nfc normalize");
    out.resize(static_cast<std::size_t>(len));
    return detail::to_utf8(out);
}

inline std::string to_lower(std::string_view text) {
    const std::u16string in = detail::to_utf16(text);
    std::u16string out(in.size() * 2 + 16, u'\0');
    UErrorCode status = U_ZERO_ERROR;
    const int32_t len = u_strToLower(out.data(), static_cast<int32_t>(out.size()), in.data(),
                                     static_cast<int32_t>(in.size()), "", &status);
    detail::icu_check(status, "lowercase");
    out.resize(static_cast<std::size_t>(len));
    return detail::to_utf8(out);
}

// One word token with its byte span in the original string.
struct Token {
    std::string text;
    std::size_t begin = 0; // byte offset
    std::size_t end = 0;   // one past the last byte
};

// Word tokens plus the surface string they came from. Rebuilding with an
// empty substitution map reproduces the surface string byte-exactly.
class TokenizedText {
public:
    TokenizedText() = default;
    TokenizedText(std::string original, std::vector<Token> tokens)
        : original_(std::move(original)), tokens_(std::move(tokens)) {}

    const std::string& original() const { return original_; }
    const std::vector<Token>& tokens() const { return tokens_; }
    std::size_t size() const { return tokens_.size(); }
    const Token& operator[](std::size_t i) const { return tokens_[i]; }

    std::string detokenize() const { return original_; }

    // Splice per-index replacements into the surface string. An empty
    // replacement deletes the token and one adjacent space when present.
    std::string rebuild(const std::map<std::size_t, std::string>& replacements) const {
        std::string out;
        out.reserve(original_.size() + 16);
        std::size_t cursor = 0;
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            const auto it = replacements.find(i);
            if (it == replacements.end()) continue;
            std::size_t begin = tokens_[i].begin;
            std::size_t end = tokens_[i].end;
            if (it->second.empty()) {
                // swallow one trailing space, else one leading space
                if (end < original_.size() && original_[end] == ' ')
                    ++end;
                else if (begin > cursor && begin > 0 && original_[begin - 1] == ' ')
                    --begin;
            }
            out.append(original_, cursor, begin - cursor);
            out.append(it->second);
            cursor = end;
        }
        out.append(original_, cursor, original_.size() - cursor);
        return out;
    }

private:
    std::string original_;
    std::vector<Token> tokens_;
};

// Unicode word segmentation (ICU word break); only word-status segments
// become tokens, so punctuation and spaces stay in the surrounding text.
inline TokenizedText tokenize(std::string_view text) {
    std::vector<Token> tokens;
    if (!text.empty()) {
        UErrorCode status = U_ZERO_ERROR;
        UText* ut = utext_openUTF8(nullptr, text.data(), static_cast<int64_t>(text.size()), &status);
        detail::icu_check(status, "open utext");
        UBreakIterator* bi = ubrk_open(UBRK_WORD, "en", nullptr, 0, &status);
        if (U_FAILURE(status)) {
            utext_close(ut);
            detail::icu_check(status, "open break iterator");
        }
        ubrk_setUText(bi, ut, &status);
        if (U_SUCCESS(status)) {
            int32_t start = ubrk_first(bi);
            for (int32_t end = ubrk_next(bi); end != UBRK_DONE; start = end, end = ubrk_next(bi)) {
                if (ubrk_getRuleStatus(bi) != UBRK_WORD_NONE) {
                    tokens.push_back(Token{std::string(text.substr(start, end - start)),
                                           static_cast<std::size_t>(start),
                                           static_cast<std::size_t>(end)});
                }
            }
        }
        ubrk_close(bi);
        utext_close(ut);
        detail::icu_check(status, "word segmentation");
    }
    return TokenizedText(std::string(text), std::move(tokens));
}

inline std::vector<std::string> word_tokens_lower(std::string_view text) {
    const TokenizedText t = tokenize(text);
    std::vector<std::string> out;
    out.reserve(t.size());
    for (const auto& tok : t.tokens()) out.push_back(to_lower(tok.text));
    return out;
}

inline std::size_t count_letters(std::string_view text) {
    const std::u16string u = detail::to_utf16(text);
    std::size_t n = 0;
    for (int32_t i = 0; i < static_cast<int32_t>(u.size());) {
        UChar32 c;
        U16_NEXT(u.data(), i, static_cast<int32_t>(u.size()), c);
        if (u_isalpha(c)) ++n;
    }
    return n;
}

// Runs of terminal punctuation, floored at one.
inline std::size_t count_sentences(std::string_view text) {
    std::size_t n = 0;
    bool in_run = false;
    for (char c : text) {
        const bool terminal = (c == '.' || c == '!' || c == '?');
        if (terminal && !in_run) ++n;
        in_run = terminal;
    }
    return n > 0 ? n : 1;
}

// Sentence spans (byte ranges) used by sentence-stage attacks.
inline std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            std::size_t end = i + 1;
            while (end < text.size() &&
                   (text[end] == '.' || text[end] == '!' || text[end] == '?'))
                ++end;
            spans.emplace_back(start, end);
            i = end - 1;
            start = end;
        }
    }
    if (start < text.size()) {
        bool only_space = true;
        for (std::size_t i = start; i < text.size(); ++i)
            if (!std::isspace(static_cast<unsigned char>(text[i]))) only_space = false;
        if (!only_space) spans.emplace_back(start, text.size());
    }
    if (spans.empty() && !text.empty()) spans.emplace_back(0, text.size());
    return spans;
}

} // namespace hatebench
