#pragma once
// Normalization, tokenization and sentence/clause segmentation.
//
// Everything downstream (matching, embeddings, features) operates on the
// token norms produced here, so the rules are deliberately small and frozen:
//   - sentences end at . ! ? followed by whitespace (with decimal and
//     abbreviation guards) and at newlines
//   - tokens split on whitespace and on structural punctuation , ; : ( ) [ ] { }
//   - norm = lowercase with non-alphanumeric characters removed
//   - clause barriers are recorded where , ; : fall between tokens

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "notewatch/corpus_types.hpp"

namespace notewatch {

struct Token {
    std::string surface;   // exact slice of the original text
    std::string norm;      // lowercased, alphanumeric-only; never empty
    std::size_t begin = 0; // byte offsets into the original note text
    std::size_t end = 0;
};

struct Sentence {
    std::vector<Token> tokens;
    // Gap indices g (1 <= g < tokens.size()): a clause barrier sits between
    // token g-1 and token g. Sorted, unique.
    std::vector<std::size_t> clause_boundaries;
};

struct TokenizedNote {
    std::string note_id;
    std::vector<Sentence> sentences;
};

// Lowercase ASCII letters, keep digits, drop all other ASCII.
// Bytes >= 0x80 (UTF-8 continuation/lead) pass through unchanged: clinical
// corpora are ASCII-dominant and we refuse to corrupt multibyte sequences.
inline std::string normalize_token(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (unsigned char c : raw) {
        if (c >= 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (std::isalnum(c)) {
            out.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    return out;
}

// Multi-token phrases (lexicon entries) normalize token-by-token with the
// same splitting rules as tokenize(), joined by single spaces.
std::string normalize_phrase(std::string_view raw);

namespace detail {

inline const std::unordered_set<std::string>& sentence_abbreviations() {
    static const std::unordered_set<std::string> abbrevs = {
        "pt", "pts", "dr", "mr", "mrs", "ms", "vs", "st", "etc", "eg", "ie",
        "approx", "q", "qd", "qh", "bid", "tid", "qid", "prn", "amt", "wt",
        "ht", "hr", "hrs", "resp",
    };
    return abbrevs;
}

inline bool is_structural_punct(char c) {
    switch (c) {
        case ',': case ';': case ':':
        case '(': case ')': case '[': case ']': case '{': case '}':
            return true;
        default:
            return false;
    }
}

inline bool is_clause_punct(std::string_view s) {
    for (char c : s)
        if (c == ',' || c == ';' || c == ':') return true;
    return false;
}

inline bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// Word preceding text[dot] back to the last whitespace, alnum-only lowercase.
inline std::string word_before(std::string_view text, std::size_t dot) {
    std::size_t start = dot;
    while (start > 0 && !is_space(text[start - 1])) --start;
    return normalize_token(text.substr(start, dot - start));
}

// True if text[i] ends a sentence. . ! ? end one only when followed by
// whitespace or end-of-text; a period additionally survives when the word
// before it is a known clinical abbreviation. Decimals like 102.4 never
// qualify because the period is followed by a digit.
inline bool ends_sentence(std::string_view text, std::size_t i) {
    char c = text[i];
    if (c == '\n' || c == '\r') return true;
    if (c != '.' && c != '!' && c != '?') return false;
    if (i + 1 < text.size() && !is_space(text[i + 1])) return false;
    if (c == '.') {
        const std::string before = word_before(text, i);
        if (detail::sentence_abbreviations().count(before)) return false;
    }
    return true;
}

// Tokenize one sentence span [begin, end) of the original text.
inline Sentence tokenize_span(std::string_view text, std::size_t begin, std::size_t end) {
    Sentence sentence;
    std::vector<std::size_t> barriers;
    std::size_t i = begin;
    while (i < end) {
        if (is_space(text[i])) { ++i; continue; }
        std::size_t frag_begin = i;
        bool structural = is_structural_punct(text[i]);
        if (structural) {
            ++i;  // each structural punctuation char is its own fragment
        } else {
            while (i < end && !is_space(text[i]) && !is_structural_punct(text[i])) ++i;
        }
        std::string_view surface = text.substr(frag_begin, i - frag_begin);
        std::string norm = normalize_token(surface);
        if (norm.empty()) {
            if (is_clause_punct(surface)) barriers.push_back(sentence.tokens.size());
            continue;
        }
        Token tok;
        tok.surface = std::string(surface);
        tok.norm = std::move(norm);
        tok.begin = frag_begin;
        tok.end = i;
        sentence.tokens.push_back(std::move(tok));
    }
    const std::size_t n = sentence.tokens.size();
    for (std::size_t g : barriers) {
        if (g >= 1 && g < n) {
            if (sentence.clause_boundaries.empty() || sentence.clause_boundaries.back() != g)
                sentence.clause_boundaries.push_back(g);
        }
    }
    return sentence;
}

}  // namespace detail

inline std::string normalize_phrase(std::string_view raw) {
    std::string joined;
    std::size_t i = 0;
    while (i < raw.size()) {
        if (detail::is_space(raw[i]) || detail::is_structural_punct(raw[i])) { ++i; continue; }
        std::size_t b = i;
        while (i < raw.size() && !detail::is_space(raw[i]) && !detail::is_structural_punct(raw[i])) ++i;
        std::string norm = normalize_token(raw.substr(b, i - b));
        if (norm.empty()) continue;
        if (!joined.empty()) joined.push_back(' ');
        joined += norm;
    }
    return joined;
}

inline std::vector<Sentence> tokenize_text(std::string_view text) {
    std::vector<Sentence> sentences;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        bool boundary = (i == text.size()) || detail::ends_sentence(text, i);
        if (!boundary) continue;
        std::size_t end = (i == text.size()) ? i : i + 1;  // keep the terminator in the span
        if (i < text.size() && (text[i] == '\n' || text[i] == '\r')) end = i;
        Sentence s = detail::tokenize_span(text, start, end);
        if (!s.tokens.empty()) sentences.push_back(std::move(s));
        start = i + 1;
    }
    return sentences;
}

inline TokenizedNote tokenize(const Note& note) {
    TokenizedNote out;
    out.note_id = note.note_id;
    out.sentences = tokenize_text(note.text);
    return out;
}

}  // namespace notewatch
