#pragma once

#include <map>
#include <string>
#include <vector>

#include "bugsum/corpus.hpp"
#include "bugsum/features.hpp"

namespace bugsum::ranking {

using Matrix = std::vector<std::vector<double>>;

struct TrainConfig {
    double l2_lambda = 1e-4; // ridge penalty on weights; bias unpenalized
    int max_iters = 500;
    double tol = 1e-8; // relative loss-change stopping criterion

    std::string hash() const;
};

struct RankModel {
    features::Schema schema = features::Schema::lrca11;
    std::vector<double> weights; // in standardized feature space
    double bias = 0.0;
    std::vector<double> means;
    std::vector<double> stds; // constant columns stored as 1
    std::string config_hash;
};

// Mean penalized negative log-likelihood and its gradient; exposed so the
// analytic gradient can be checked against finite differences.
double penalized_loss(const Matrix& X, const std::vector<int>& y,
                      const std::vector<double>& w, double b, double lambda);
void penalized_gradient(const Matrix& X, const std::vector<int>& y,
                        const std::vector<double>& w, double b, double lambda,
                        std::vector<double>& grad_w, double& grad_b);

// Deterministic full-batch gradient descent with Armijo backtracking;
// initialization at zero, no randomness.  Columns are standardized first and
// the statistics stored in the model.
RankModel train(const Matrix& X, const std::vector<int>& y, features::Schema schema,
                const TrainConfig& cfg = {},
                const std::vector<std::string>* sentence_ids = nullptr);

double predict(const RankModel& model, const std::vector<double>& x);

// Per-report sentence ranking by predicted probability, each fold trained on
// every other annotated report (gold-standard labels).  Reports whose gold
// standard is empty are excluded.  Fold stats cover only that fold's training
// reports.
std::map<std::string, std::vector<RankedSentence>> leave_one_out(
    const AnnotatedCorpus& corpus, features::Schema schema, const TrainConfig& cfg = {},
    double dup_threshold = 0.8, int threads = 1);

// Same, restricted to a subset of the schema's attribute columns (used by the
// volunteer ablation and attribute-removal runs).  Empty mask = all columns.
std::map<std::string, std::vector<RankedSentence>> leave_one_out_masked(
    const AnnotatedCorpus& corpus, features::Schema schema,
    const std::vector<int>& column_subset, const TrainConfig& cfg = {},
    double dup_threshold = 0.8, int threads = 1);

void save_model(const RankModel& model, const std::string& path);
RankModel load_model(const std::string& path);

} // namespace bugsum::ranking
