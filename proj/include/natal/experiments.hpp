#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "natal/classifier.hpp"
#include "natal/gbt.hpp"
#include "natal/gnb_svm.hpp"
#include "natal/ingest.hpp"
#include "natal/linear_models.hpp"
#include "natal/metrics.hpp"
#include "natal/mlp.hpp"
#include "natal/sampling.hpp"

namespace natal {

enum class ModelFamily { LAS, RID, LOG, GNB, SVM, XGB, NN };

const std::string& to_string(ModelFamily f);
ModelFamily family_from_string(const std::string& s);

struct Hyper {
    double lasso_alpha = 1.0;
    double ridge_alpha = 1.0;
    double logistic_l2 = 0.0;
    double gnb_eps = -1.0;
    double svm_gamma = 1e-9;
    double svm_nu = 0.5;
    long svm_max_train_rows = 4000;  // seeded subsample cap on the kernel problem
    GbtParams gbt;
    MlpParams mlp;
};

struct ExperimentSpec {
    ModelFamily family = ModelFamily::XGB;
    FeatureSubset subset = FeatureSubset::All;
    SampleRatio ratio = SampleRatio::OneToTen;
    std::uint64_t seed = 0;
    std::vector<int> train_years = {2000, 2001};
    int test_year = 2002;
    std::optional<Race> race_filter;
    double threshold = 0.5;
    Hyper hyper;

    std::string id() const;  // stable content hash, used for report filenames
};

struct EvaluationReport {
    double precision = 0.0;
    double recall = 0.0;
    double auc = 0.0;
    ConfusionCounts counts;
    long n = 0;
    double positive_rate = 0.0;
    std::map<std::string, std::string> metadata;
    std::vector<StratumRow> mortality_table;  // empty unless filled by strata reports
    std::vector<StratumRow> cause_table;
    long cause_unlinked_excluded = 0;
};

struct ExperimentResult {
    ExperimentSpec spec;
    EvaluationReport report;
    double wall_seconds = 0.0;  // not serialized; reports stay byte-reproducible
    bool converged = true;
    std::optional<std::string> error;
    std::vector<std::uint8_t> test_predictions;  // hard labels on the test set
};

// fit imputer on train -> impute both -> encode -> select subset -> resample
// train -> fit -> evaluate on the untouched test distribution
ExperimentResult run_binary(const ExperimentSpec& spec, const Dataset& train, const Dataset& test);

struct GridRunResult {
    std::vector<ExperimentResult> results;  // spec order
    // per ratio: index into results of the best cell by AUC then recall
    std::map<std::string, int> best_per_ratio;
};

GridRunResult run_grid(const std::vector<ExperimentSpec>& specs, const Dataset& train,
                       const Dataset& test, int threads = 1);

struct RaceRunResult {
    std::vector<std::pair<Race, ExperimentResult>> results;
    std::vector<std::pair<Race, std::string>> skipped;  // race -> reason
};

RaceRunResult run_race_models(const ExperimentSpec& spec, const Dataset& train, const Dataset& test,
                              long min_minority = 50);

// fills result.report.mortality_table / cause_table from the stored test
// predictions; unlinked deaths are excluded from the cause table and counted
void run_strata_reports(ExperimentResult& result, const Dataset& test);

struct ImportanceResult {
    std::vector<std::pair<std::string, double>> ranking;  // descending gain
};

// gain importance on the natural-imbalance training distribution (ratio is
// forced to Natural); XGB only
ImportanceResult run_importance(const ExperimentSpec& spec, const Dataset& train);

// learner factory used by run_binary and by CV grids
Learner make_learner(const ExperimentSpec& spec);

}  // namespace natal
