// bugsum: corpus-to-summary pipeline for bug-report conversations.
//
// Subcommands: ingest | summarize | train | loo-eval | bench-build |
// bench-eval | attr-stats | ablate.  Exit codes: 0 success, 1 usage error,
// 2 data/format error, 3 numeric failure.  Set BUGSUM_LOG={error,info,debug}
// for diagnostics on stderr.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "bugsum/benchgen.hpp"
#include "bugsum/corpus.hpp"
#include "bugsum/errors.hpp"
#include "bugsum/eval.hpp"
#include "bugsum/features.hpp"
#include "bugsum/log.hpp"
#include "bugsum/ranking.hpp"
#include "bugsum/summarizer.hpp"
#include "bugsum/vsm.hpp"

namespace {

using namespace bugsum;

int default_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

std::vector<summarizer::Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<summarizer::Method> out;
    for (const std::string& n : names) out.push_back(summarizer::method_from_string(n));
    return out;
}

// Labeled design matrix over every annotated report with a non-empty gold
// standard, in corpus order.
void build_training_data(const AnnotatedCorpus& corpus, const vsm::CorpusStats& stats,
                         features::Schema schema, double dup_threshold,
                         ranking::Matrix& X, std::vector<int>& y,
                         std::vector<std::string>& ids) {
    for (const BugReport& r : corpus.reports) {
        auto it = corpus.annotations.find(r.report_id);
        if (it == corpus.annotations.end()) continue;
        const eval::GoldStandard gs = eval::gold_standard(r.report_id, it->second);
        if (gs.gss.empty()) continue;
        for (const features::SentenceFeatures& f :
             features::extract_all(r, stats, schema, dup_threshold)) {
            X.push_back(f.values);
            y.push_back(gs.gss.count(f.sentence_id) ? 1 : 0);
            ids.push_back(r.report_id + ":" + f.sentence_id);
        }
    }
    if (X.empty())
        throw DataError("training: no annotated reports with a non-empty gold standard");
}

void write_json_file(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << "\n";
}

Json fisher_json_value(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    return v;
}

// ---- subcommand bodies --------------------------------------------------

void run_ingest(const std::string& in, const std::string& out) {
    const std::vector<RawReport> raw = load_raw_reports(in);
    std::vector<BugReport> reports;
    reports.reserve(raw.size());
    for (const RawReport& r : raw) reports.push_back(ingest_report(r));
    save_corpus(reports, out);
    log_info("ingest: wrote " + std::to_string(reports.size()) + " reports to " + out);
}

void run_summarize(const std::string& corpus_path, const std::string& method_name,
                   const std::string& model_path, const std::string& stats_path,
                   const summarizer::SummarizeOptions& sopt, const std::string& out,
                   bool text) {
    const std::vector<BugReport> corpus = load_corpus(corpus_path);
    const summarizer::Method method = summarizer::method_from_string(method_name);
    ranking::RankModel model;
    const ranking::RankModel* model_ptr = nullptr;
    if (summarizer::is_supervised(method)) {
        if (model_path.empty())
            throw UsageError("method " + method_name + " needs --model");
        model = ranking::load_model(model_path);
        model_ptr = &model;
    }
    const vsm::CorpusStats stats =
        stats_path.empty() ? vsm::build_stats(corpus) : vsm::load_stats(stats_path);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        if (!file) throw DataError("cannot write " + out);
        os = &file;
    }
    for (const BugReport& r : corpus) {
        const summarizer::Summary s = summarizer::summarize(r, method, stats, model_ptr, sopt);
        if (text)
            *os << summarizer::summary_to_text(s, r) << "\n";
        else
            *os << summarizer::summary_to_json(s, method, sopt.budget_fraction).dump()
                << "\n";
    }
}

void run_train(const std::string& corpus_path, const std::string& ann_path,
               const std::string& schema_name, double dup_threshold,
               const ranking::TrainConfig& cfg, const std::string& out,
               const std::string& dump_csv) {
    const AnnotatedCorpus corpus = load_annotated_corpus(corpus_path, ann_path);
    const features::Schema schema = features::schema_from_string(schema_name);
    const vsm::CorpusStats stats = vsm::build_stats(corpus.reports);
    ranking::Matrix X;
    std::vector<int> y;
    std::vector<std::string> ids;
    build_training_data(corpus, stats, schema, dup_threshold, X, y, ids);
    if (!dump_csv.empty()) {
        std::map<std::string, std::map<std::string, int>> labels;
        for (const BugReport& r : corpus.reports) {
            auto it = corpus.annotations.find(r.report_id);
            if (it == corpus.annotations.end()) continue;
            const eval::GoldStandard gs = eval::gold_standard(r.report_id, it->second);
            if (gs.gss.empty()) continue;
            auto& m = labels[r.report_id];
            for (const Sentence* s : r.flat_sentences())
                m[s->id] = gs.gss.count(s->id) ? 1 : 0;
        }
        features::dump_features_csv(corpus.reports, stats, schema, dump_csv, &labels,
                                    dup_threshold);
    }
    const ranking::RankModel model = ranking::train(X, y, schema, cfg, &ids);
    ranking::save_model(model, out);
    log_info("train: " + std::to_string(X.size()) + " sentences, " +
             std::to_string(std::count(y.begin(), y.end(), 1)) + " positive; model -> " +
             out);
}

void run_loo_eval(const std::string& corpus_path, const std::string& ann_path,
                  const std::vector<std::string>& method_names, const eval::EvalOptions& opt,
                  const std::string& out) {
    const AnnotatedCorpus corpus = load_annotated_corpus(corpus_path, ann_path);
    std::vector<summarizer::Method> methods =
        method_names.empty()
            ? std::vector<summarizer::Method>{summarizer::Method::lrca,
                                              summarizer::Method::brc,
                                              summarizer::Method::centroid,
                                              summarizer::Method::mmr,
                                              summarizer::Method::grasshopper,
                                              summarizer::Method::divrank,
                                              summarizer::Method::hurried}
            : parse_methods(method_names);
    const eval::EvalReport report = eval::loo_evaluate(corpus, methods, opt);
    std::cout << eval::eval_table_text(report);
    if (!out.empty()) write_json_file(eval::eval_report_to_json(report), out);
}

void run_bench_build(const std::string& corpus_path, std::uint64_t seed,
                     const std::string& status_filter, const std::string& out_corpus,
                     const std::string& out_manifest) {
    const std::vector<BugReport> corpus = load_corpus(corpus_path);
    const benchgen::InjectedBenchmark bench =
        benchgen::build_benchmark(corpus, seed, status_filter);
    save_corpus(bench.reports, out_corpus);
    benchgen::save_manifest(bench, out_manifest);
    log_info("bench-build: " + std::to_string(bench.reports.size()) + " reports injected");
    std::cout << "benchmark: " << bench.reports.size() << " reports, seed " << seed
              << ", corpus hash " << bench.corpus_hash << "\n";
}

void run_bench_eval(const std::string& corpus_path, const std::string& manifest_path,
                    const std::vector<std::string>& method_names,
                    const std::string& model_path, const summarizer::SummarizeOptions& sopt,
                    const std::string& out) {
    const std::vector<BugReport> corpus = load_corpus(corpus_path);
    const benchgen::Manifest manifest = benchgen::load_manifest(manifest_path);
    const vsm::CorpusStats stats = vsm::build_stats(corpus);
    const std::vector<summarizer::Method> methods = parse_methods(
        method_names.empty() ? std::vector<std::string>{"centroid"} : method_names);

    Json results_json;
    char line[64];
    std::snprintf(line, sizeof(line), "%-12s %9s\n", "Method", "HitRate");
    std::cout << line;
    Json per_method = Json::object();
    for (summarizer::Method m : methods) {
        ranking::RankModel model;
        const ranking::RankModel* model_ptr = nullptr;
        if (summarizer::is_supervised(m)) {
            if (model_path.empty())
                throw UsageError("method " + summarizer::method_to_string(m) +
                                 " needs --model");
            model = ranking::load_model(model_path);
            model_ptr = &model;
        }
        std::map<std::string, summarizer::Summary> results;
        for (const BugReport& r : corpus)
            results.emplace(r.report_id,
                            summarizer::summarize(r, m, stats, model_ptr, sopt));
        const double rate = eval::hit_rate(results, manifest.injected);
        std::snprintf(line, sizeof(line), "%-12s %9.2f\n",
                      summarizer::method_to_string(m).c_str(), 100.0 * rate);
        std::cout << line;
        per_method[summarizer::method_to_string(m)] = rate;
    }
    if (!out.empty()) {
        results_json["config"] = Json{{"seed", manifest.seed},
                                      {"corpus_hash", manifest.corpus_hash},
                                      {"budget_fraction", sopt.budget_fraction},
                                      {"dup_threshold", sopt.dup_threshold},
                                      {"n_reports", corpus.size()},
                                      {"n_injected", manifest.injected.size()}};
        results_json["hit_rate"] = std::move(per_method);
        write_json_file(results_json, out);
    }
}

void run_attr_stats(const std::string& corpus_path, const std::string& ann_path,
                    const std::string& schema_name, double dup_threshold,
                    const std::string& out) {
    const AnnotatedCorpus corpus = load_annotated_corpus(corpus_path, ann_path);
    const features::Schema schema = features::schema_from_string(schema_name);
    const vsm::CorpusStats stats = vsm::build_stats(corpus.reports);
    ranking::Matrix X;
    std::vector<int> y;
    std::vector<std::string> ids;
    build_training_data(corpus, stats, schema, dup_threshold, X, y, ids);

    const std::vector<std::string>& names = features::schema_attributes(schema);
    std::vector<std::vector<double>> columns(names.size(),
                                             std::vector<double>(X.size(), 0.0));
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j) columns[j][i] = X[i][j];

    std::vector<std::pair<std::string, double>> fisher;
    for (std::size_t j = 0; j < names.size(); ++j)
        fisher.emplace_back(names[j], eval::fisher_score(columns[j], y));
    std::stable_sort(fisher.begin(), fisher.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    char line[64];
    std::snprintf(line, sizeof(line), "%-10s %12s\n", "Attribute", "Fisher");
    std::cout << line;
    for (const auto& [name, score] : fisher) {
        std::snprintf(line, sizeof(line), "%-10s %12.4f\n", name.c_str(), score);
        std::cout << line;
    }

    const std::vector<eval::Merge> merges = eval::attribute_cluster(columns);
    // Resolve linkage ids back to attribute-name groups for the text view.
    std::vector<std::vector<std::string>> groups;
    for (const std::string& n : names) groups.push_back({n});
    auto group_of = [&](int id) { return groups[static_cast<std::size_t>(id)]; };
    std::cout << "\nAttribute clustering (average linkage on |rho|):\n";
    for (const eval::Merge& m : merges) {
        std::vector<std::string> a = group_of(m.a), b = group_of(m.b);
        auto join = [](const std::vector<std::string>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) s += " ";
                s += v[i];
            }
            return s;
        };
        std::snprintf(line, sizeof(line), "  %.4f  ", m.height);
        std::cout << line << "[" << join(a) << "] + [" << join(b) << "]\n";
        a.insert(a.end(), b.begin(), b.end());
        groups.push_back(std::move(a));
    }

    if (!out.empty()) {
        Json j;
        j["config"] = Json{{"schema", schema_name},
                           {"dup_threshold", dup_threshold},
                           {"n_sentences", X.size()},
                           {"n_positive", std::count(y.begin(), y.end(), 1)}};
        Json jf = Json::array();
        for (const auto& [name, score] : fisher)
            jf.push_back(Json{{"attribute", name}, {"fisher", fisher_json_value(score)}});
        j["fisher"] = std::move(jf);
        Json jr = Json::array();
        for (std::size_t a = 0; a < names.size(); ++a) {
            Json row = Json::array();
            for (std::size_t b = 0; b < names.size(); ++b)
                row.push_back(a == b ? 1.0 : eval::spearman_rho(columns[a], columns[b]));
            jr.push_back(std::move(row));
        }
        j["spearman"] = std::move(jr);
        Json jc = Json::array();
        for (const eval::Merge& m : merges)
            jc.push_back(Json{{"a", m.a}, {"b", m.b}, {"height", m.height}});
        j["cluster"] = std::move(jc);
        write_json_file(j, out);
    }
}

void run_ablate(const std::string& corpus_path, const std::string& ann_path,
                const std::string& matrix_path, const eval::EvalOptions& opt,
                const std::string& out_dir) {
    const AnnotatedCorpus corpus = load_annotated_corpus(corpus_path, ann_path);
    const eval::VolunteerMatrix matrix = eval::load_volunteer_matrix(matrix_path);
    std::filesystem::create_directories(out_dir);
    const eval::AblationResult result = eval::ablate_volunteers(matrix, corpus, opt);
    std::cout << "volunteers: " << matrix.volunteer_ids.size()
              << ", distinct attribute sets: " << result.distinct_sets << "\n";
    for (const auto& [metric, table] : result.winning) {
        const std::string path = out_dir + "/winning_" + metric + ".csv";
        eval::write_winning_csv(result, metric, path);
        std::cout << "wrote " << path << "\n";
    }
    Json j;
    j["config"] = result.config;
    Json sets = Json::array();
    for (const auto& [mask, row] : result.per_set)
        sets.push_back(Json{{"attribute_mask", mask},
                            {"precision", row.precision},
                            {"recall", row.recall},
                            {"f_score", row.f},
                            {"pyramid", row.pyramid}});
    j["per_set"] = std::move(sets);
    Json w = Json::object();
    for (const auto& [metric, table] : result.winning) {
        Json rows = Json::object();
        for (std::size_t b = 0; b < result.baselines.size(); ++b)
            rows[result.baselines[b]] = table[b];
        w[metric] = std::move(rows);
    }
    j["winning"] = std::move(w);
    write_json_file(j, out_dir + "/ablation.json");
    std::cout << "wrote " << out_dir << "/ablation.json\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bug-report summarization pipeline"};
    app.require_subcommand(1);

    // Shared option storage.
    std::string corpus_path, ann_path, model_path, stats_path, out, in_path;
    std::string schema_name = "lrca11";
    std::vector<std::string> method_names;
    std::vector<std::string> drop_attrs;
    double budget = 0.25, dup_threshold = 0.8, mmr_lambda = 0.5;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
    int threads = default_threads();
    std::string pyramid_mode = "sentences", avg = "macro";
    std::string out_corpus, out_manifest, manifest_path, status_filter, matrix_path;
    std::string out_dir = ".", dump_csv;
    bool text_output = false;

    auto add_corpus = [&](CLI::App* c, bool required = true) {
        auto* o = c->add_option("--corpus", corpus_path, "corpus file (one report per line)");
        if (required) o->required();
    };
    auto add_annotations = [&](CLI::App* c) {
        c->add_option("--annotations", ann_path, "annotation file")->required();
    };
    auto add_budget = [&](CLI::App* c) {
        c->add_option("--budget", budget, "summary word budget as a fraction");
        c->add_option("--dup-threshold", dup_threshold, "cosine threshold for DUP");
    };
    auto add_eval_flags = [&](CLI::App* c) {
        c->add_option("--pyramid-mode", pyramid_mode, "sentences|words")
            ->check(CLI::IsMember({"sentences", "words"}));
        c->add_option("--avg", avg, "macro|micro")
            ->check(CLI::IsMember({"macro", "micro"}));
        c->add_option("--threads", threads, "worker threads");
        c->add_option("--mmr-lambda", mmr_lambda, "MMR relevance/redundancy trade-off");
        c->add_option("--l2", l2, "L2 regularization strength");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "raw reports -> corpus file");
    ingest->add_option("--in", in_path, "raw report file")->required();
    ingest->add_option("--out", out, "corpus output path")->required();

    CLI::App* summarize = app.add_subcommand("summarize", "corpus -> summaries");
    add_corpus(summarize);
    summarize->add_option("--method", method_names, "ranking method")->expected(1);
    summarize->add_option("--model", model_path, "trained model (supervised methods)");
    summarize->add_option("--stats-cache", stats_path, "precomputed corpus statistics");
    add_budget(summarize);
    summarize->add_option("--mmr-lambda", mmr_lambda, "MMR relevance/redundancy trade-off");
    summarize->add_option("--out", out, "output path (default stdout)");
    summarize->add_flag("--text", text_output, "human-readable output");

    CLI::App* train = app.add_subcommand("train", "annotated corpus -> model");
    add_corpus(train);
    add_annotations(train);
    train->add_option("--schema", schema_name, "feature schema");
    train->add_option("--l2", l2, "L2 regularization strength");
    add_budget(train);
    train->add_option("--dump-features", dump_csv, "also write the labeled feature CSV");
    train->add_option("--out", out, "model output path")->required();

    CLI::App* loo = app.add_subcommand("loo-eval", "leave-one-out evaluation table");
    add_corpus(loo);
    add_annotations(loo);
    loo->add_option("--method", method_names, "methods to evaluate (repeatable)");
    loo->add_option("--drop-attr", drop_attrs, "attributes removed before training");
    add_budget(loo);
    add_eval_flags(loo);
    loo->add_option("--out", out, "evaluation report JSON path");

    CLI::App* bbuild = app.add_subcommand("bench-build", "title-injection benchmark");
    add_corpus(bbuild);
    bbuild->add_option("--seed", seed, "benchmark seed")->required();
    bbuild->add_option("--status-filter", status_filter,
                       "keep reports whose status contains this substring");
    bbuild->add_option("--out-corpus", out_corpus, "revised corpus path")->required();
    bbuild->add_option("--out-manifest", out_manifest, "manifest path")->required();

    CLI::App* beval = app.add_subcommand("bench-eval", "HitRate over a benchmark");
    add_corpus(beval);
    beval->add_option("--manifest", manifest_path, "benchmark manifest")->required();
    beval->add_option("--method", method_names, "methods to evaluate (repeatable)");
    beval->add_option("--model", model_path, "trained model (supervised methods)");
    add_budget(beval);
    beval->add_option("--mmr-lambda", mmr_lambda, "MMR relevance/redundancy trade-off");
    beval->add_option("--out", out, "results JSON path");

    CLI::App* astats = app.add_subcommand("attr-stats", "Fisher ranking + clustering");
    add_corpus(astats);
    add_annotations(astats);
    astats->add_option("--schema", schema_name, "feature schema");
    add_budget(astats);
    astats->add_option("--out", out, "statistics JSON path");

    CLI::App* ablate = app.add_subcommand("ablate", "volunteer-combination ablation");
    add_corpus(ablate);
    add_annotations(ablate);
    ablate->add_option("--matrix", matrix_path, "volunteer/attribute CSV")->required();
    add_budget(ablate);
    add_eval_flags(ablate);
    ablate->add_option("--out-dir", out_dir, "directory for winning tables + JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        summarizer::SummarizeOptions sopt;
        sopt.budget_fraction = budget;
        sopt.dup_threshold = dup_threshold;
        sopt.mmr_lambda = mmr_lambda;

        eval::EvalOptions eopt;
        eopt.budget_fraction = budget;
        eopt.dup_threshold = dup_threshold;
        eopt.pyramid_mode = eval::pyramid_mode_from_string(pyramid_mode);
        eopt.micro = avg == "micro";
        eopt.train.l2_lambda = l2;
        eopt.mmr_lambda = mmr_lambda;
        eopt.threads = threads;
        eopt.drop_attributes = drop_attrs;

        ranking::TrainConfig tcfg;
        tcfg.l2_lambda = l2;

        if (ingest->parsed()) {
            run_ingest(in_path, out);
        } else if (summarize->parsed()) {
            if (method_names.empty()) throw UsageError("summarize needs --method");
            run_summarize(corpus_path, method_names.front(), model_path, stats_path, sopt,
                          out, text_output);
        } else if (train->parsed()) {
            run_train(corpus_path, ann_path, schema_name, dup_threshold, tcfg, out,
                      dump_csv);
        } else if (loo->parsed()) {
            run_loo_eval(corpus_path, ann_path, method_names, eopt, out);
        } else if (bbuild->parsed()) {
            run_bench_build(corpus_path, seed, status_filter, out_corpus, out_manifest);
        } else if (beval->parsed()) {
            run_bench_eval(corpus_path, manifest_path, method_names, model_path, sopt, out);
        } else if (astats->parsed()) {
            run_attr_stats(corpus_path, ann_path, schema_name, dup_threshold, out);
        } else if (ablate->parsed()) {
            run_ablate(corpus_path, ann_path, matrix_path, eopt, out_dir);
        }
    } catch (const UsageError& e) {
        std::cerr << "bugsum: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "bugsum: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "bugsum: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "bugsum: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
