#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bugsum/corpus.hpp"

namespace bugsum::benchgen {

// Title-injection benchmark: each surviving report gets its title inserted as
// a new one-sentence reporter comment at a seeded-uniform position, and a
// manifest records where.
struct InjectedBenchmark {
    std::uint64_t seed = 0;
    std::string corpus_hash; // hex digest of the filtered source corpus
    std::vector<BugReport> reports;
    std::map<std::string, std::string> injected; // report_id -> sentence id
};

// Revised copy of T plus the injected sentence id.  The slot is drawn from a
// per-report stream (report-id hash mixed with the seed), uniform over the
// positions after turn 1: a report with m turns has m legal slots.
std::pair<BugReport, std::string> inject_title(const BugReport& T, std::uint64_t seed);

// Inject every report whose status contains the (case-insensitive) filter
// substring; empty filter keeps everything.  Reports with an empty title are
// excluded with a warning.
InjectedBenchmark build_benchmark(const std::vector<BugReport>& corpus,
                                  std::uint64_t seed,
                                  const std::string& status_filter = "");

// Inverse of inject_title given the recorded sentence id.
BugReport remove_injected(const BugReport& revised, const std::string& injected_id);

// Stable digest of a corpus in its serialized line format.
std::string corpus_digest(const std::vector<BugReport>& corpus);

Json manifest_to_json(const InjectedBenchmark& bench);
void save_manifest(const InjectedBenchmark& bench, const std::string& path);

struct Manifest {
    std::uint64_t seed = 0;
    std::string corpus_hash;
    std::map<std::string, std::string> injected;
};
Manifest load_manifest(const std::string& path);

} // namespace bugsum::benchgen
