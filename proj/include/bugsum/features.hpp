#pragma once

#include <string>
#include <vector>

#include "bugsum/corpus.hpp"
#include "bugsum/vsm.hpp"

namespace bugsum::features {

enum class Schema { lrca11, brc24, hurried3, combine27 };

Schema schema_from_string(const std::string& name);
std::string schema_to_string(Schema schema);
const std::vector<std::string>& schema_attributes(Schema schema);
inline std::size_t schema_width(Schema s) { return schema_attributes(s).size(); }

struct SentenceFeatures {
    std::string sentence_id;
    Schema schema = Schema::lrca11;
    std::vector<double> values;
};

// ---- LRCA attributes ----------------------------------------------------
// Similarity with the report topic (all sentences aggregated).
double swt(const Sentence& s, const BugReport& T, const vsm::CorpusStats& stats);
// Similarity with the description; 1 for description sentences.
double swd(const Sentence& s, const BugReport& T, const vsm::CorpusStats& stats);
// 1 if an earlier sentence is more similar than the threshold.
int dup(const Sentence& s, const BugReport& T, const vsm::CorpusStats& stats,
        double threshold = 0.8);
// Character length over the report's max sentence character length.
double slen(const Sentence& s, const BugReport& T);
// Sum of tf-idf weights over the report's max such sum; 0/0 -> 0.
double si(const Sentence& s, const BugReport& T, const vsm::CorpusStats& stats);
// 1-based flat position over total sentence count.
double sloc(const Sentence& s, const BugReport& T);
// Containing turn's character length over the max turn length.
double clen(const Sentence& s, const BugReport& T);
// 1 iff the sentence is in the description turn.
int des(const Sentence& s, const BugReport& T);
// 0 if the text carries a hyperlink; 1 if a token stems to "problem"; else 0.5.
double ccw(const Sentence& s);
// Code-snippet heuristics (shared with the segmenter).
int code(const Sentence& s);
// 1 iff the containing turn's author is the reporter (trimmed exact match).
int rep(const Sentence& s, const BugReport& T);
// Lexicon-based polarity: sign(positive hits - negative hits).
int sentiment(const Sentence& s);

// ---- batch extractors ---------------------------------------------------
SentenceFeatures extract_lrca(const Sentence& s, const BugReport& T,
                              const vsm::CorpusStats& stats, double dup_threshold = 0.8);
// The 24 conversation attributes.  Split-based values use: COS1/COS2 compare
// the strictly-before vs strictly-after halves; PENT covers the conversation
// up to and including s; SENT strictly after; CWS counts distinct terms of s
// present in the previous or next turn.  Reports without full timestamps use
// turn-index positions for the time attributes; single-turn reports get 0.
SentenceFeatures extract_brc(const Sentence& s, const BugReport& T,
                             const vsm::CorpusStats& stats);
SentenceFeatures extract_hurried(const Sentence& s, const BugReport& T,
                                 const vsm::CorpusStats& stats);

// Whole-report extraction; one row per sentence in document order.
std::vector<SentenceFeatures> extract_all(const BugReport& T, const vsm::CorpusStats& stats,
                                          Schema schema, double dup_threshold = 0.8);

// True when the report lacks usable timestamps and extract_brc fell back to
// turn indices for TPOS/PPAU/SPAU.
bool uses_time_fallback(const BugReport& T);

// CSV dump: header "sentence_id[,label],<attributes...>"; one row per sentence
// in document order.  labels, when given, maps sentence_id -> 0/1.
void dump_features_csv(const std::vector<BugReport>& reports, const vsm::CorpusStats& stats,
                       Schema schema, const std::string& path,
                       const std::map<std::string, std::map<std::string, int>>* labels = nullptr,
                       double dup_threshold = 0.8);

} // namespace bugsum::features
