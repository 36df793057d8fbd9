#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace bugsum {

// Insertion-ordered JSON keeps emitted files in documented field order and
// makes serialization byte-reproducible.
using Json = nlohmann::ordered_json;

struct Sentence {
    std::string id;       // "<turn_no>.<index>", index 1-based within the turn
    std::string text;     // verbatim sentence text
    std::vector<std::string> tokens; // lowercased, stop-filtered, stemmed
    int char_len = 0;     // characters in text
    int word_count = 0;   // whitespace-delimited words in text
};

enum class TurnKind { description, comment };

struct Turn {
    int turn_no = 0; // 1-based; turn 1 is the description
    std::string author;
    std::optional<std::int64_t> timestamp; // seconds since epoch, optional
    TurnKind kind = TurnKind::comment;
    std::vector<Sentence> sentences;
};

struct BugReport {
    std::string report_id;
    std::string title;
    std::string reporter;
    std::string status; // optional passthrough; empty when absent
    std::vector<Turn> turns;

    int total_words() const;
    std::size_t sentence_count() const;
    // Flat document order: turns in order, sentences in order within each.
    std::vector<const Sentence*> flat_sentences() const;
    const Sentence* find_sentence(const std::string& id) const;
};

// Raw (unsegmented) report as produced by a tracker export.
struct RawComment {
    std::string author;
    std::optional<std::int64_t> timestamp;
    std::string text;
};

struct RawReport {
    std::string report_id;
    std::string title;
    std::string reporter;
    std::optional<std::int64_t> timestamp;
    std::string description;
    std::string status;
    std::vector<RawComment> comments;
};

// One annotator's sentence selection for a report.
struct AnnotationSet {
    std::string annotator_id;
    std::set<std::string> selected; // sentence ids
};

struct AnnotatedCorpus {
    std::vector<BugReport> reports;
    std::map<std::string, std::vector<AnnotationSet>> annotations; // by report_id
};

// Shared ranked-list element produced by every ranker.
struct RankedSentence {
    std::string id;
    double score = 0.0;
};

// Descending score; ties broken by ascending input (document) position.
std::vector<RankedSentence> order_by_score(const std::vector<std::string>& ids,
                                           const std::vector<double>& scores);

// Split free text into sentences.  Boundaries are sentence terminators (. ! ?)
// followed by whitespace, plus hard newlines.  Lines that look like code are
// kept whole; URLs survive because dots inside them are not followed by
// whitespace.  Empty/whitespace-only pieces are dropped.
std::vector<std::string> segment_sentences(const std::string& text);

// Heuristic used by the segmenter to keep code-looking lines unsplit.
bool looks_like_code(const std::string& line);

// Segment + preprocess a raw report into the canonical form.  Turn 1 is the
// description; comments follow in order.  Reports whose description yields no
// sentences are rejected.
BugReport ingest_report(const RawReport& raw);

// Recompute tokens / char_len / word_count for every sentence (used after
// loading a pre-segmented corpus, where boundaries are taken verbatim).
void refresh_derived(BugReport& report);

Json report_to_json(const BugReport& report);
BugReport report_from_json(const Json& j);

// ndjson: one report object per line.
std::vector<BugReport> load_corpus(const std::string& path);
void save_corpus(const std::vector<BugReport>& reports, const std::string& path);

// ndjson raw tracker export, one {"report_id","title","reporter","description",
// "comments":[...]} object per line.
std::vector<RawReport> load_raw_reports(const std::string& path);

// ndjson: {"report_id","annotators":[{"annotator_id","selected":[...]}]}.
std::map<std::string, std::vector<AnnotationSet>> load_annotations(const std::string& path);
void save_annotations(const std::map<std::string, std::vector<AnnotationSet>>& ann,
                      const std::string& path);

// Corpus + annotations with referential integrity checks (unknown report ids
// or sentence ids in annotations are errors).
AnnotatedCorpus load_annotated_corpus(const std::string& corpus_path,
                                      const std::string& annotations_path);

} // namespace bugsum
