#include "bugsum/benchgen.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "bugsum/errors.hpp"
#include "bugsum/log.hpp"
#include "bugsum/util.hpp"

namespace bugsum::benchgen {

namespace {

void renumber(BugReport& report) {
    for (std::size_t t = 0; t < report.turns.size(); ++t) {
        Turn& turn = report.turns[t];
        turn.turn_no = static_cast<int>(t) + 1;
        for (std::size_t s = 0; s < turn.sentences.size(); ++s)
            turn.sentences[s].id =
                std::to_string(turn.turn_no) + "." + std::to_string(s + 1);
    }
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

std::pair<BugReport, std::string> inject_title(const BugReport& T, std::uint64_t seed) {
    if (trim_view(T.title).empty())
        throw DataError("inject: report " + T.report_id + " has an empty title");
    if (T.turns.empty())
        throw DataError("inject: report " + T.report_id + " has no turns");

    // Independent per-report stream so corpus order cannot shift placements.
    std::mt19937_64 rng(fnv1a64(T.report_id) ^ seed);
    const std::uint64_t slot = uniform_below(rng, T.turns.size());

    BugReport revised = T;
    Turn injected;
    injected.kind = TurnKind::comment;
    injected.author = T.reporter;
    injected.timestamp = std::nullopt;
    Sentence s;
    s.text = T.title;
    injected.sentences.push_back(std::move(s));
    revised.turns.insert(revised.turns.begin() + static_cast<std::ptrdiff_t>(slot) + 1,
                         std::move(injected));
    renumber(revised);
    refresh_derived(revised);
    const std::string injected_id = std::to_string(slot + 2) + ".1";
    return {std::move(revised), injected_id};
}

InjectedBenchmark build_benchmark(const std::vector<BugReport>& corpus,
                                  std::uint64_t seed, const std::string& status_filter) {
    const std::string want = lowercase_ascii(status_filter);
    std::vector<const BugReport*> kept;
    for (const BugReport& r : corpus) {
        if (!want.empty() &&
            lowercase_ascii(r.status).find(want) == std::string::npos)
            continue;
        kept.push_back(&r);
    }

    InjectedBenchmark bench;
    bench.seed = seed;
    std::uint64_t h = 14695981039346656037ull;
    for (const BugReport* r : kept) {
        std::string line = report_to_json(*r).dump();
        line.push_back('\n');
        h = fnv1a64(line, h);
    }
    bench.corpus_hash = hex64(h);
    for (const BugReport* r : kept) {
        if (trim_view(r->title).empty()) {
            log_info("bench: skipping report " + r->report_id + " (empty title)");
            continue;
        }
        auto [revised, id] = inject_title(*r, seed);
        bench.reports.push_back(std::move(revised));
        bench.injected[r->report_id] = id;
    }
    return bench;
}

BugReport remove_injected(const BugReport& revised, const std::string& injected_id) {
    const std::size_t dot = injected_id.find('.');
    if (dot == std::string::npos)
        throw DataError("remove: malformed sentence id " + injected_id);
    const int turn_no = std::stoi(injected_id.substr(0, dot));
    if (turn_no < 2 || static_cast<std::size_t>(turn_no) > revised.turns.size())
        throw DataError("remove: report " + revised.report_id + " has no turn " +
                        std::to_string(turn_no));
    const Turn& target = revised.turns[static_cast<std::size_t>(turn_no) - 1];
    if (target.sentences.size() != 1 || target.sentences.front().id != injected_id)
        throw DataError("remove: turn " + std::to_string(turn_no) + " of report " +
                        revised.report_id + " is not a single-sentence injected turn");
    BugReport original = revised;
    original.turns.erase(original.turns.begin() + (turn_no - 1));
    renumber(original);
    refresh_derived(original);
    return original;
}

std::string corpus_digest(const std::vector<BugReport>& corpus) {
    std::uint64_t h = 14695981039346656037ull;
    for (const BugReport& r : corpus) {
        std::string line = report_to_json(r).dump();
        line.push_back('\n');
        h = fnv1a64(line, h);
    }
    return hex64(h);
}

Json manifest_to_json(const InjectedBenchmark& bench) {
    Json j;
    j["seed"] = bench.seed;
    j["corpus_hash"] = bench.corpus_hash;
    Json entries = Json::array();
    for (const auto& [rid, sid] : bench.injected)
        entries.push_back(Json{{"report_id", rid}, {"injected_id", sid}});
    j["entries"] = std::move(entries);
    return j;
}

void save_manifest(const InjectedBenchmark& bench, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("manifest: cannot write " + path);
    out << manifest_to_json(bench).dump(2) << "\n";
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("manifest: cannot open " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw DataError("manifest " + path + ": " + e.what());
    }
    Manifest m;
    if (!j.contains("seed") || !j.contains("entries"))
        throw DataError("manifest " + path + ": missing seed/entries");
    m.seed = j["seed"].get<std::uint64_t>();
    m.corpus_hash = j.value("corpus_hash", std::string());
    for (const Json& e : j["entries"]) {
        const std::string rid = e.at("report_id").get<std::string>();
        if (!m.injected.emplace(rid, e.at("injected_id").get<std::string>()).second)
            throw DataError("manifest " + path + ": duplicate report " + rid);
    }
    return m;
}

} // namespace bugsum::benchgen
