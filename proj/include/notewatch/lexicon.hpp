#pragma once
// Antibiotic dictionary plus negation/speculation/conjunction trigger lists,
// with the embedding-driven expansion + manual review workflow.
//
// On-disk form: a directory of six line-oriented files (antibiotics.txt,
// pre_negation.txt, post_negation.txt, pre_speculation.txt,
// post_speculation.txt, conjunctions.txt), one phrase per line, `#` comments.

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "notewatch/embeddings.hpp"
#include "notewatch/error.hpp"
#include "notewatch/textnorm.hpp"

namespace notewatch {

enum class LexiconSet {
    ANTIBIOTICS,
    PRE_NEGATION,
    POST_NEGATION,
    PRE_SPECULATION,
    POST_SPECULATION,
    CONJUNCTIONS,
};

inline std::string_view to_string(LexiconSet set) {
    switch (set) {
        case LexiconSet::ANTIBIOTICS:      return "antibiotics";
        case LexiconSet::PRE_NEGATION:     return "pre_negation";
        case LexiconSet::POST_NEGATION:    return "post_negation";
        case LexiconSet::PRE_SPECULATION:  return "pre_speculation";
        case LexiconSet::POST_SPECULATION: return "post_speculation";
        case LexiconSet::CONJUNCTIONS:     return "conjunctions";
    }
    return "antibiotics";
}

inline LexiconSet lexicon_set_from_string(std::string_view name) {
    if (name == "antibiotics") return LexiconSet::ANTIBIOTICS;
    if (name == "pre_negation") return LexiconSet::PRE_NEGATION;
    if (name == "post_negation") return LexiconSet::POST_NEGATION;
    if (name == "pre_speculation") return LexiconSet::PRE_SPECULATION;
    if (name == "post_speculation") return LexiconSet::POST_SPECULATION;
    if (name == "conjunctions") return LexiconSet::CONJUNCTIONS;
    fail("unknown lexicon set \"" + std::string(name) + "\"");
}

constexpr std::array<LexiconSet, 6> kAllLexiconSets = {
    LexiconSet::ANTIBIOTICS,      LexiconSet::PRE_NEGATION,
    LexiconSet::POST_NEGATION,    LexiconSet::PRE_SPECULATION,
    LexiconSet::POST_SPECULATION, LexiconSet::CONJUNCTIONS,
};

struct Lexicon {
    std::set<std::string> antibiotic_terms;
    std::set<std::string> pre_negation_triggers;
    std::set<std::string> post_negation_triggers;
    std::set<std::string> pre_speculation_triggers;
    std::set<std::string> post_speculation_triggers;
    std::set<std::string> conjunctions;

    std::set<std::string>& set_of(LexiconSet s) {
        switch (s) {
            case LexiconSet::ANTIBIOTICS:      return antibiotic_terms;
            case LexiconSet::PRE_NEGATION:     return pre_negation_triggers;
            case LexiconSet::POST_NEGATION:    return post_negation_triggers;
            case LexiconSet::PRE_SPECULATION:  return pre_speculation_triggers;
            case LexiconSet::POST_SPECULATION: return post_speculation_triggers;
            case LexiconSet::CONJUNCTIONS:     return conjunctions;
        }
        return antibiotic_terms;
    }
    const std::set<std::string>& set_of(LexiconSet s) const {
        return const_cast<Lexicon*>(this)->set_of(s);
    }

    bool contains_anywhere(const std::string& phrase) const {
        for (LexiconSet s : kAllLexiconSets)
            if (set_of(s).count(phrase)) return true;
        return false;
    }

    // Antibiotic terms must never double as triggers or conjunctions.
    void validate() const {
        std::vector<std::string> offenders;
        for (const auto& term : antibiotic_terms) {
            for (LexiconSet s : kAllLexiconSets) {
                if (s == LexiconSet::ANTIBIOTICS) continue;
                if (set_of(s).count(term)) {
                    offenders.push_back(term + " (also in " + std::string(to_string(s)) + ")");
                    break;
                }
            }
        }
        if (!offenders.empty()) {
            std::string msg = "lexicon: antibiotic terms overlap trigger sets:";
            for (const auto& o : offenders) msg += " " + o;
            fail(msg);
        }
    }

    bool operator==(const Lexicon&) const = default;
};

enum class ReviewDecision { PENDING, ACCEPTED, REJECTED };

inline std::string_view to_string(ReviewDecision d) {
    switch (d) {
        case ReviewDecision::PENDING:  return "PENDING";
        case ReviewDecision::ACCEPTED: return "ACCEPTED";
        case ReviewDecision::REJECTED: return "REJECTED";
    }
    return "PENDING";
}

inline ReviewDecision review_decision_from_string(std::string_view s) {
    if (s == "PENDING") return ReviewDecision::PENDING;
    if (s == "ACCEPTED") return ReviewDecision::ACCEPTED;
    if (s == "REJECTED") return ReviewDecision::REJECTED;
    fail("unknown review decision \"" + std::string(s) + "\"");
}

struct ExpansionCandidate {
    std::string seed_term;
    std::string candidate;
    double cosine = 0.0;
    ReviewDecision decision = ReviewDecision::PENDING;
};

struct ExpansionProposal {
    std::vector<ExpansionCandidate> candidates;
    std::vector<std::string> skipped_seeds;  // multi-token or out-of-vocabulary
};

namespace detail {

inline std::string lexicon_file_name(LexiconSet s) {
    return std::string(to_string(s)) + ".txt";
}

inline std::set<std::string> load_phrase_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("lexicon: missing file " + path.string());
    std::set<std::string> phrases;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (auto pos = view.find_first_not_of(" \t\r"); pos != std::string_view::npos)
            view.remove_prefix(pos);
        else
            continue;
        if (view.empty() || view.front() == '#') continue;
        std::string norm = normalize_phrase(view);
        if (norm.empty())
            fail("lexicon: " + path.string() + ":" + std::to_string(lineno) +
                 ": phrase normalizes to empty");
        phrases.insert(std::move(norm));
    }
    return phrases;
}

}  // namespace detail

inline Lexicon load_lexicon(const std::string& dir) {
    Lexicon lex;
    for (LexiconSet s : kAllLexiconSets) {
        const auto path = std::filesystem::path(dir) / detail::lexicon_file_name(s);
        lex.set_of(s) = detail::load_phrase_file(path);
    }
    for (const auto& term : lex.antibiotic_terms) {
        const auto tokens = 1 + std::count(term.begin(), term.end(), ' ');
        if (tokens > 4) fail("lexicon: antibiotic phrase \"" + term + "\" exceeds 4 tokens");
    }
    lex.validate();
    return lex;
}

inline void save_lexicon(const Lexicon& lex, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (LexiconSet s : kAllLexiconSets) {
        const auto path = std::filesystem::path(dir) / detail::lexicon_file_name(s);
        std::ofstream out(path, std::ios::binary);
        if (!out) fail("lexicon: cannot write " + path.string());
        for (const auto& phrase : lex.set_of(s)) out << phrase << "\n";
    }
}

// Propose vocabulary neighbors of the target set's single-token seeds as
// expansion candidates. Tokens already present anywhere in the lexicon are
// never proposed; duplicates keep their highest cosine.
inline ExpansionProposal propose_expansions(const Lexicon& lexicon, const EmbeddingTable& table,
                                            LexiconSet target_set, std::size_t k,
                                            double min_cosine) {
    if (k < 1) fail("propose_expansions: k must be >= 1");
    ExpansionProposal proposal;
    std::map<std::string, ExpansionCandidate> best;  // candidate -> best-scoring entry
    for (const auto& seed : lexicon.set_of(target_set)) {
        if (seed.find(' ') != std::string::npos || !table.contains(seed)) {
            proposal.skipped_seeds.push_back(seed);
            continue;
        }
        for (const auto& [token, cos] : nearest(table, seed, k)) {
            if (cos < min_cosine) continue;
            if (lexicon.contains_anywhere(token)) continue;
            auto it = best.find(token);
            if (it == best.end() || cos > it->second.cosine)
                best[token] = ExpansionCandidate{seed, token, cos, ReviewDecision::PENDING};
        }
    }
    for (auto& [token, cand] : best) proposal.candidates.push_back(std::move(cand));
    std::sort(proposal.candidates.begin(), proposal.candidates.end(),
              [](const ExpansionCandidate& a, const ExpansionCandidate& b) {
                  if (a.cosine != b.cosine) return a.cosine > b.cosine;
                  return a.candidate < b.candidate;
              });
    return proposal;
}

// Fold reviewed candidates into a copy of the lexicon. Accepted candidates
// join the set that holds their seed term; the input lexicon is untouched.
inline Lexicon apply_reviews(const Lexicon& lexicon,
                             const std::vector<ExpansionCandidate>& candidates) {
    Lexicon next = lexicon;
    for (const auto& cand : candidates) {
        if (cand.decision == ReviewDecision::PENDING)
            fail("apply_reviews: candidate \"" + cand.candidate + "\" is still PENDING");
        if (cand.decision != ReviewDecision::ACCEPTED) continue;
        bool placed = false;
        for (LexiconSet s : kAllLexiconSets) {
            if (next.set_of(s).count(cand.seed_term)) {
                next.set_of(s).insert(normalize_phrase(cand.candidate));
                placed = true;
                break;
            }
        }
        if (!placed)
            fail("apply_reviews: seed term \"" + cand.seed_term + "\" not found in lexicon");
    }
    next.validate();
    return next;
}

// Candidate TSV: header "seed\tcandidate\tcosine\tdecision".
inline void save_candidates_tsv(const std::vector<ExpansionCandidate>& candidates,
                                const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path + ": cannot open for writing");
    out << "seed\tcandidate\tcosine\tdecision\n";
    char buf[32];
    for (const auto& c : candidates) {
        std::snprintf(buf, sizeof(buf), "%.6f", c.cosine);
        out << c.seed_term << "\t" << c.candidate << "\t" << buf << "\t"
            << to_string(c.decision) << "\n";
    }
}

inline std::vector<ExpansionCandidate> load_candidates_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path + ": cannot open file");
    std::string line;
    if (!std::getline(in, line) || line != "seed\tcandidate\tcosine\tdecision")
        fail(path + ": bad candidates header");
    std::vector<ExpansionCandidate> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        ExpansionCandidate cand;
        std::string cosine_cell, decision_cell;
        if (!std::getline(ls, cand.seed_term, '\t') || !std::getline(ls, cand.candidate, '\t') ||
            !std::getline(ls, cosine_cell, '\t') || !std::getline(ls, decision_cell))
            fail(path + ":" + std::to_string(lineno) + ": malformed candidate row");
        try {
            cand.cosine = std::stod(cosine_cell);
        } catch (const std::exception&) {
            fail(path + ":" + std::to_string(lineno) + ": bad cosine \"" + cosine_cell + "\"");
        }
        cand.decision = review_decision_from_string(decision_cell);
        out.push_back(std::move(cand));
    }
    return out;
}

}  // namespace notewatch
