#pragma once
// Core corpus value types: the note, its label, and split parameters.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "notewatch/error.hpp"

namespace notewatch {

enum class Label { POSITIVE, POSSIBLE, NEGATIVE };

enum class Provenance { WEAK_RULE, GOLD_HUMAN, SYNTH_TRUTH };

inline std::string_view to_string(Label label) {
    switch (label) {
        case Label::POSITIVE: return "POSITIVE";
        case Label::POSSIBLE: return "POSSIBLE";
        case Label::NEGATIVE: return "NEGATIVE";
    }
    return "NEGATIVE";
}

inline std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::WEAK_RULE:   return "WEAK_RULE";
        case Provenance::GOLD_HUMAN:  return "GOLD_HUMAN";
        case Provenance::SYNTH_TRUTH: return "SYNTH_TRUTH";
    }
    return "WEAK_RULE";
}

inline Label label_from_string(std::string_view s) {
    if (s == "POSITIVE") return Label::POSITIVE;
    if (s == "POSSIBLE") return Label::POSSIBLE;
    if (s == "NEGATIVE") return Label::NEGATIVE;
    fail("unknown label \"" + std::string(s) + "\"");
}

inline Provenance provenance_from_string(std::string_view s) {
    if (s == "WEAK_RULE") return Provenance::WEAK_RULE;
    if (s == "GOLD_HUMAN") return Provenance::GOLD_HUMAN;
    if (s == "SYNTH_TRUTH") return Provenance::SYNTH_TRUTH;
    fail("unknown provenance \"" + std::string(s) + "\"");
}

// One free-text clinical note; the unit of classification.
struct Note {
    std::string note_id;
    std::string text;
    std::optional<std::string> timestamp;    // ISO-8601 when present
    std::optional<std::string> patient_ref;
};

struct LabeledNote {
    Note note;
    Label label = Label::NEGATIVE;
    Provenance provenance = Provenance::WEAK_RULE;
};

struct SplitSpec {
    double train_fraction = 0.7;  // in (0,1)
    std::uint64_t seed = 42;
    bool stratified = true;
};

}  // namespace notewatch
