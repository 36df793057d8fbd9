#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bugsum/corpus.hpp"
#include "bugsum/ranking.hpp"
#include "bugsum/summarizer.hpp"

namespace bugsum::eval {

// ---- gold standards -----------------------------------------------------
struct GoldStandard {
    std::string report_id;
    std::map<std::string, int> votes; // sentence id -> annotator votes
    std::set<std::string> gss;        // strict majority (> k/2)
};

GoldStandard gold_standard(const std::string& report_id,
                           const std::vector<AnnotationSet>& annotators);

// ---- set metrics --------------------------------------------------------
double precision(const std::vector<std::string>& selected, const std::set<std::string>& gss);
double recall(const std::vector<std::string>& selected, const std::set<std::string>& gss);
double f_score(double p, double r);

enum class PyramidMode { sentences, words };
PyramidMode pyramid_mode_from_string(const std::string& name);

// Achieved annotator-vote mass over the best achievable at the same summary
// size (same sentence count, or same word allowance in words mode).
// 1 when nothing is achievable (max mass 0).
double pyramid(const summarizer::Summary& summary, const GoldStandard& gold,
               const BugReport& T, PyramidMode mode = PyramidMode::sentences);

// Fraction of benchmark reports whose injected sentence made the summary.
double hit_rate(const std::map<std::string, summarizer::Summary>& results,
                const std::map<std::string, std::string>& injected);

// ---- attribute statistics ----------------------------------------------
// Between-class mean separation over summed unbiased within-class variances.
// Zero spread with separated means -> +infinity sentinel; 0/0 -> 0.
double fisher_score(const std::vector<double>& values, const std::vector<int>& labels);

// Pearson correlation of mid-ranks; degenerate (constant) input -> 0.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

// Agglomerative average-linkage clustering on |rho| similarity.
// Cluster ids follow the usual linkage convention: originals 0..n-1, merge t
// creates cluster n+t.  Heights are similarities (first merges are highest).
struct Merge {
    int a = 0, b = 0;
    double height = 0.0;
};
std::vector<Merge> attribute_cluster(const std::vector<std::vector<double>>& columns);

struct WilcoxonResult {
    double statistic = 0.0; // min(W+, W-)
    double p_two_sided = 1.0;
    int n_used = 0; // pairs surviving zero-difference removal
    bool exact = false;
};
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b);

// ---- evaluation harness -------------------------------------------------
struct EvalOptions {
    double budget_fraction = 0.25;
    double dup_threshold = 0.8;
    PyramidMode pyramid_mode = PyramidMode::sentences;
    bool micro = false; // aggregate by pooling instead of per-report means
    ranking::TrainConfig train;
    baselines::WalkConfig walk;
    double mmr_lambda = 0.5;
    int threads = 1;
    // Attribute names removed from supervised schemas before training.
    std::vector<std::string> drop_attributes;
};

struct MetricRow {
    double precision = 0.0, recall = 0.0, f = 0.0, pyramid = 0.0;
};

struct MethodEval {
    summarizer::Method method = summarizer::Method::centroid;
    std::map<std::string, MetricRow> per_report;
    MetricRow aggregate;
};

struct EvalReport {
    std::vector<MethodEval> methods;
    // method -> metric name -> two-sided p against the lrca pairing
    std::map<std::string, std::map<std::string, double>> wilcoxon_vs_lrca;
    Json config;
};

// Leave-one-out evaluation of the given methods over the annotated reports.
// Supervised methods train per fold; unsupervised ones use whole-corpus stats.
EvalReport loo_evaluate(const AnnotatedCorpus& corpus,
                        const std::vector<summarizer::Method>& methods,
                        const EvalOptions& opt = {});

Json eval_report_to_json(const EvalReport& report);
// Fixed-width method x metric table, percentages to 2 decimals.
std::string eval_table_text(const EvalReport& report);

// ---- volunteer ablation -------------------------------------------------
struct VolunteerMatrix {
    std::vector<std::string> volunteer_ids;
    std::vector<std::string> attributes;     // column names
    std::vector<std::uint32_t> contributed;  // per volunteer, bit per attribute
};

VolunteerMatrix load_volunteer_matrix(const std::string& path);

// Sorted unique attribute unions over all non-empty volunteer combinations.
std::vector<std::uint32_t> distinct_attribute_sets(const VolunteerMatrix& matrix);

struct AblationResult {
    std::size_t distinct_sets = 0;
    std::vector<std::string> baselines; // row order of the winning tables
    // metric name -> [baseline][k-1] percentage of k-combinations beating it
    std::map<std::string, std::vector<std::vector<double>>> winning;
    // aggregate metric per distinct attribute mask
    std::map<std::uint32_t, MetricRow> per_set;
    Json config;
};

// Train/evaluate the supervised ranker under every distinct attribute subset
// and tabulate, per combination size, how often each baseline is beaten.
AblationResult ablate_volunteers(const VolunteerMatrix& matrix,
                                 const AnnotatedCorpus& corpus,
                                 const EvalOptions& opt = {});

// One CSV per metric: header "baseline,k=1..k=n"; cells to 1 decimal.
void write_winning_csv(const AblationResult& result, const std::string& metric,
                       const std::string& path);

} // namespace bugsum::eval
