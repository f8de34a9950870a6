#pragma once
// Corpus I/O (JSONL and CSV) and deterministic train/test splitting.
//
// JSONL record: {"note_id": str, "text": str, "timestamp"?: str,
// "patient_ref"?: str, "label"?: str, "provenance"?: str}.
// CSV is header-driven (note_id,text[,timestamp,patient_ref,label,provenance])
// with RFC-4180 quoting; unrecognized columns are ignored.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "notewatch/corpus_types.hpp"
#include "notewatch/error.hpp"

namespace notewatch {

enum class CorpusFormat { JSONL, CSV };

struct SplitResult {
    std::vector<LabeledNote> train;
    std::vector<LabeledNote> test;
};

namespace detail {

inline bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

inline void validate_note(const Note& note, const std::string& where) {
    if (note.note_id.empty()) fail(where + ": empty note_id");
    if (note.text.empty() || is_blank(note.text))
        fail(where + ": note \"" + note.note_id + "\" has empty text");
}

// One parsed record plus the line it started on (for error messages).
struct RawRecord {
    Note note;
    std::optional<Label> label;
    std::optional<Provenance> provenance;
    std::size_t line = 0;
};

inline RawRecord parse_jsonl_record(const std::string& line, std::size_t lineno,
                                    const std::string& path) {
    const std::string where = path + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        fail(where + ": malformed JSON record: " + e.what());
    }
    if (!j.is_object()) fail(where + ": record is not a JSON object");
    if (!j.contains("note_id") || !j["note_id"].is_string())
        fail(where + ": record missing \"note_id\"");
    if (!j.contains("text") || !j["text"].is_string())
        fail(where + ": record missing \"text\"");
    RawRecord rec;
    rec.line = lineno;
    rec.note.note_id = j["note_id"].get<std::string>();
    rec.note.text = j["text"].get<std::string>();
    if (j.contains("timestamp")) rec.note.timestamp = j["timestamp"].get<std::string>();
    if (j.contains("patient_ref")) rec.note.patient_ref = j["patient_ref"].get<std::string>();
    try {
        if (j.contains("label")) rec.label = label_from_string(j["label"].get<std::string>());
        if (j.contains("provenance"))
            rec.provenance = provenance_from_string(j["provenance"].get<std::string>());
    } catch (const Error& e) {
        fail(where + ": " + e.what());
    }
    validate_note(rec.note, where);
    return rec;
}

// RFC-4180: fields separated by commas, quoted fields may contain commas,
// quotes ("") and newlines. Returns one row per record; `line` is the input
// line the record started on.
struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

inline std::vector<CsvRow> parse_csv(const std::string& content, const std::string& path) {
    std::vector<CsvRow> rows;
    CsvRow row;
    row.line = 1;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;
    std::size_t lineno = 1;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row = CsvRow{};
        row.line = lineno;
        row_started = false;
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        char c = content[i];
        if (c == '\n') ++lineno;
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty())
                    fail(path + ":" + std::to_string(lineno) + ": stray quote inside unquoted field");
                in_quotes = true;
                row_started = true;
                break;
            case ',':
                end_field();
                row_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_started || !field.empty() || !row.fields.empty()) end_row();
                else row.line = lineno;
                break;
            default:
                field.push_back(c);
                row_started = true;
                break;
        }
    }
    if (in_quotes) fail(path + ": unterminated quoted field");
    if (row_started || !field.empty() || !row.fields.empty()) end_row();
    return rows;
}

inline std::vector<RawRecord> load_csv_records(const std::string& content, const std::string& path) {
    auto rows = parse_csv(content, path);
    if (rows.empty()) fail(path + ": empty corpus (no records)");
    const auto& header = rows.front().fields;
    auto column = [&](const std::string& name) -> std::ptrdiff_t {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    const std::ptrdiff_t id_col = column("note_id");
    const std::ptrdiff_t text_col = column("text");
    if (id_col < 0) fail(path + ": CSV header missing \"note_id\" column");
    if (text_col < 0) fail(path + ": CSV header missing \"text\" column");
    const std::ptrdiff_t ts_col = column("timestamp");
    const std::ptrdiff_t ref_col = column("patient_ref");
    const std::ptrdiff_t label_col = column("label");
    const std::ptrdiff_t prov_col = column("provenance");

    std::vector<RawRecord> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = path + ":" + std::to_string(row.line);
        auto get = [&](std::ptrdiff_t col) -> std::string {
            if (col < 0 || static_cast<std::size_t>(col) >= row.fields.size()) return {};
            return row.fields[static_cast<std::size_t>(col)];
        };
        if (static_cast<std::size_t>(std::max(id_col, text_col)) >= row.fields.size())
            fail(where + ": record missing \"" +
                 (static_cast<std::size_t>(id_col) >= row.fields.size() ? "note_id" : "text") +
                 "\"");
        RawRecord rec;
        rec.line = row.line;
        rec.note.note_id = get(id_col);
        rec.note.text = get(text_col);
        if (std::string v = get(ts_col); !v.empty()) rec.note.timestamp = v;
        if (std::string v = get(ref_col); !v.empty()) rec.note.patient_ref = v;
        try {
            if (std::string v = get(label_col); !v.empty()) rec.label = label_from_string(v);
            if (std::string v = get(prov_col); !v.empty())
                rec.provenance = provenance_from_string(v);
        } catch (const Error& e) {
            fail(where + ": " + e.what());
        }
        validate_note(rec.note, where);
        records.push_back(std::move(rec));
    }
    return records;
}

inline std::vector<RawRecord> load_records(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path + ": cannot open file");
    std::vector<RawRecord> records;
    if (format == CorpusFormat::JSONL) {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (is_blank(line)) continue;
            records.push_back(parse_jsonl_record(line, lineno, path));
        }
    } else {
        std::stringstream buf;
        buf << in.rdbuf();
        records = load_csv_records(buf.str(), path);
    }
    if (records.empty()) fail(path + ": empty corpus (no records)");

    std::unordered_set<std::string> seen;
    seen.reserve(records.size());
    for (const auto& rec : records) {
        if (!seen.insert(rec.note.note_id).second)
            fail(path + ":" + std::to_string(rec.line) + ": duplicate note_id \"" +
                 rec.note.note_id + "\"");
    }
    return records;
}

}  // namespace detail

inline std::vector<Note> load_corpus(const std::string& path,
                                     CorpusFormat format = CorpusFormat::JSONL) {
    std::vector<Note> notes;
    for (auto& rec : detail::load_records(path, format)) notes.push_back(std::move(rec.note));
    return notes;
}

// Labeled variant: every record must carry both label and provenance, so
// rule-generated and human-annotated sets stay distinguishable.
inline std::vector<LabeledNote> load_labeled_corpus(const std::string& path,
                                                    CorpusFormat format = CorpusFormat::JSONL) {
    std::vector<LabeledNote> notes;
    for (auto& rec : detail::load_records(path, format)) {
        const std::string where = path + ":" + std::to_string(rec.line);
        if (!rec.label) fail(where + ": record missing \"label\"");
        if (!rec.provenance) fail(where + ": record missing \"provenance\"");
        notes.push_back(LabeledNote{std::move(rec.note), *rec.label, *rec.provenance});
    }
    return notes;
}

inline nlohmann::json note_to_json(const Note& note) {
    nlohmann::json j;
    j["note_id"] = note.note_id;
    j["text"] = note.text;
    if (note.timestamp) j["timestamp"] = *note.timestamp;
    if (note.patient_ref) j["patient_ref"] = *note.patient_ref;
    return j;
}

inline nlohmann::json labeled_note_to_json(const LabeledNote& ln) {
    nlohmann::json j = note_to_json(ln.note);
    j["label"] = std::string(to_string(ln.label));
    j["provenance"] = std::string(to_string(ln.provenance));
    return j;
}

inline void save_corpus(const std::vector<Note>& notes, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path + ": cannot open for writing");
    for (const auto& note : notes) out << note_to_json(note).dump() << "\n";
}

inline void save_labeled_corpus(const std::vector<LabeledNote>& notes, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path + ": cannot open for writing");
    for (const auto& ln : notes) out << labeled_note_to_json(ln).dump() << "\n";
}

// Seeded, optionally stratified partition. Stratified mode apportions the
// overall train target across classes by largest remainder, so each class
// deviates from train_fraction by less than one note.
inline SplitResult split(const std::vector<LabeledNote>& labeled, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        fail("split: train_fraction must lie in (0,1)");
    if (labeled.empty()) fail("split: empty input");

    const std::size_t n = labeled.size();
    const auto total_target = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(n)));
    std::mt19937_64 rng(spec.seed);
    std::vector<char> in_train(n, 0);

    if (spec.stratified) {
        const Label order[] = {Label::POSITIVE, Label::POSSIBLE, Label::NEGATIVE};
        std::vector<std::vector<std::size_t>> by_class(3);
        for (std::size_t i = 0; i < n; ++i)
            by_class[static_cast<std::size_t>(labeled[i].label)].push_back(i);
        for (Label cls : order) {
            const auto& members = by_class[static_cast<std::size_t>(cls)];
            if (!members.empty() && members.size() < 2)
                fail("split: class " + std::string(to_string(cls)) +
                     " has fewer than 2 notes; stratified split impossible");
        }
        // Largest-remainder apportionment of the overall target.
        std::size_t base_sum = 0;
        std::vector<std::pair<double, std::size_t>> remainders;  // (frac, class)
        std::vector<std::size_t> take(3, 0);
        for (std::size_t c = 0; c < 3; ++c) {
            const double quota =
                spec.train_fraction * static_cast<double>(by_class[c].size());
            take[c] = static_cast<std::size_t>(std::floor(quota));
            base_sum += take[c];
            remainders.push_back({quota - std::floor(quota), c});
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        std::size_t leftover = total_target > base_sum ? total_target - base_sum : 0;
        for (const auto& [frac, c] : remainders) {
            if (leftover == 0) break;
            if (take[c] < by_class[c].size()) {
                ++take[c];
                --leftover;
            }
        }
        for (std::size_t c = 0; c < 3; ++c) {
            auto members = by_class[c];
            std::shuffle(members.begin(), members.end(), rng);
            for (std::size_t k = 0; k < take[c]; ++k) in_train[members[k]] = 1;
        }
    } else {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t k = 0; k < total_target && k < n; ++k) in_train[idx[k]] = 1;
    }

    SplitResult result;
    for (std::size_t i = 0; i < n; ++i)
        (in_train[i] ? result.train : result.test).push_back(labeled[i]);
    return result;
}

}  // namespace notewatch
