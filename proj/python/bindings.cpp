// Python bindings for the bugsum core: text pipeline, corpus access,
// summarization, training/evaluation entry points, and the statistics
// helpers.  Container-heavy results cross the boundary as JSON strings; the
// package wrapper turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <set>
#include <string>
#include <vector>

#include "bugsum/benchgen.hpp"
#include "bugsum/corpus.hpp"
#include "bugsum/errors.hpp"
#include "bugsum/eval.hpp"
#include "bugsum/features.hpp"
#include "bugsum/ranking.hpp"
#include "bugsum/summarizer.hpp"
#include "bugsum/text.hpp"
#include "bugsum/vsm.hpp"

namespace py = pybind11;
using namespace bugsum;

namespace {

class PyCorpus {
  public:
    explicit PyCorpus(const std::string& path)
        : reports_(load_corpus(path)), stats_(vsm::build_stats(reports_)) {}

    std::size_t size() const { return reports_.size(); }

    std::vector<std::string> report_ids() const {
        std::vector<std::string> ids;
        ids.reserve(reports_.size());
        for (const BugReport& r : reports_) ids.push_back(r.report_id);
        return ids;
    }

    std::string report_json(const std::string& report_id) const {
        return report_to_json(find(report_id)).dump();
    }

    std::vector<std::pair<std::string, double>> rank(const std::string& report_id,
                                                     const std::string& method,
                                                     double budget, double dup_threshold,
                                                     const std::string& model_path) const {
        const auto ranked = ranked_for(report_id, method, budget, dup_threshold, model_path);
        std::vector<std::pair<std::string, double>> out;
        out.reserve(ranked.size());
        for (const RankedSentence& r : ranked) out.emplace_back(r.id, r.score);
        return out;
    }

    std::string summarize_json(const std::string& report_id, const std::string& method,
                               double budget, double dup_threshold,
                               const std::string& model_path) const {
        const BugReport& r = find(report_id);
        const auto ranked = ranked_for(report_id, method, budget, dup_threshold, model_path);
        const summarizer::Summary s = summarizer::select_budgeted(ranked, r, budget);
        return summarizer::summary_to_json(s, summarizer::method_from_string(method), budget)
            .dump();
    }

  private:
    const BugReport& find(const std::string& report_id) const {
        for (const BugReport& r : reports_)
            if (r.report_id == report_id) return r;
        throw DataError("unknown report " + report_id);
    }

    std::vector<RankedSentence> ranked_for(const std::string& report_id,
                                           const std::string& method, double budget,
                                           double dup_threshold,
                                           const std::string& model_path) const {
        const BugReport& r = find(report_id);
        const summarizer::Method m = summarizer::method_from_string(method);
        summarizer::SummarizeOptions opt;
        opt.budget_fraction = budget;
        opt.dup_threshold = dup_threshold;
        ranking::RankModel model;
        const ranking::RankModel* model_ptr = nullptr;
        if (summarizer::is_supervised(m)) {
            if (model_path.empty())
                throw UsageError("method " + method + " needs a model path");
            model = ranking::load_model(model_path);
            model_ptr = &model;
        }
        return summarizer::rank_sentences(r, m, stats_, model_ptr, opt);
    }

    std::vector<BugReport> reports_;
    vsm::CorpusStats stats_;
};

std::string loo_eval_json(const std::string& corpus_path, const std::string& ann_path,
                          const std::vector<std::string>& methods, double budget,
                          double dup_threshold, const std::string& pyramid_mode,
                          const std::string& avg, int threads) {
    const AnnotatedCorpus corpus = load_annotated_corpus(corpus_path, ann_path);
    std::vector<summarizer::Method> ms;
    for (const std::string& name : methods)
        ms.push_back(summarizer::method_from_string(name));
    eval::EvalOptions opt;
    opt.budget_fraction = budget;
    opt.dup_threshold = dup_threshold;
    opt.pyramid_mode = eval::pyramid_mode_from_string(pyramid_mode);
    opt.micro = avg == "micro";
    opt.threads = threads;
    return eval::eval_report_to_json(eval::loo_evaluate(corpus, ms, opt)).dump();
}

void train_model(const std::string& corpus_path, const std::string& ann_path,
                 const std::string& schema_name, const std::string& out_path, double l2,
                 double dup_threshold) {
    const AnnotatedCorpus corpus = load_annotated_corpus(corpus_path, ann_path);
    const features::Schema schema = features::schema_from_string(schema_name);
    const vsm::CorpusStats stats = vsm::build_stats(corpus.reports);
    ranking::Matrix X;
    std::vector<int> y;
    std::vector<std::string> ids;
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
    ranking::TrainConfig cfg;
    cfg.l2_lambda = l2;
    ranking::save_model(ranking::train(X, y, schema, cfg, &ids), out_path);
}

std::string build_benchmark_files(const std::string& corpus_path, std::uint64_t seed,
                                  const std::string& out_corpus,
                                  const std::string& out_manifest,
                                  const std::string& status_filter) {
    const std::vector<BugReport> corpus = load_corpus(corpus_path);
    const benchgen::InjectedBenchmark bench =
        benchgen::build_benchmark(corpus, seed, status_filter);
    save_corpus(bench.reports, out_corpus);
    benchgen::save_manifest(bench, out_manifest);
    return bench.corpus_hash;
}

py::dict wilcoxon_py(const std::vector<double>& a, const std::vector<double>& b) {
    const eval::WilcoxonResult r = eval::wilcoxon_signed_rank(a, b);
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_two_sided"] = r.p_two_sided;
    d["n_used"] = r.n_used;
    d["exact"] = r.exact;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Extractive bug-report summarization core";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def("preprocess", &text::preprocess, py::arg("text"),
          "Lowercase, tokenize, drop stop words, and stem.");
    m.def("tokenize", &text::tokenize, py::arg("text"));
    m.def("porter_stem", &text::porter_stem, py::arg("word"));
    m.def("segment_sentences", &segment_sentences, py::arg("text"));

    py::class_<PyCorpus>(m, "Corpus")
        .def(py::init<const std::string&>(), py::arg("path"))
        .def("__len__", &PyCorpus::size)
        .def("report_ids", &PyCorpus::report_ids)
        .def("report_json", &PyCorpus::report_json, py::arg("report_id"))
        .def("rank", &PyCorpus::rank, py::arg("report_id"), py::arg("method") = "centroid",
             py::arg("budget") = 0.25, py::arg("dup_threshold") = 0.8,
             py::arg("model_path") = "")
        .def("summarize_json", &PyCorpus::summarize_json, py::arg("report_id"),
             py::arg("method") = "centroid", py::arg("budget") = 0.25,
             py::arg("dup_threshold") = 0.8, py::arg("model_path") = "");

    m.def("train_model", &train_model, py::arg("corpus_path"), py::arg("annotations_path"),
          py::arg("schema") = "lrca11", py::arg("out_path") = "model.json",
          py::arg("l2") = 1e-4, py::arg("dup_threshold") = 0.8);
    m.def("loo_eval_json", &loo_eval_json, py::arg("corpus_path"),
          py::arg("annotations_path"), py::arg("methods"), py::arg("budget") = 0.25,
          py::arg("dup_threshold") = 0.8, py::arg("pyramid_mode") = "sentences",
          py::arg("avg") = "macro", py::arg("threads") = 1);
    m.def("build_benchmark", &build_benchmark_files, py::arg("corpus_path"),
          py::arg("seed"), py::arg("out_corpus"), py::arg("out_manifest"),
          py::arg("status_filter") = "",
          "Inject titles into a corpus; returns the source corpus digest.");

    m.def(
        "precision",
        [](const std::vector<std::string>& sel, const std::vector<std::string>& gss) {
            return eval::precision(sel, std::set<std::string>(gss.begin(), gss.end()));
        },
        py::arg("selected"), py::arg("gss"));
    m.def(
        "recall",
        [](const std::vector<std::string>& sel, const std::vector<std::string>& gss) {
            return eval::recall(sel, std::set<std::string>(gss.begin(), gss.end()));
        },
        py::arg("selected"), py::arg("gss"));
    m.def("f_score", &eval::f_score, py::arg("p"), py::arg("r"));
    m.def("spearman", &eval::spearman_rho, py::arg("x"), py::arg("y"));
    m.def("fisher_score", &eval::fisher_score, py::arg("values"), py::arg("labels"));
    m.def("wilcoxon", &wilcoxon_py, py::arg("a"), py::arg("b"));
}
