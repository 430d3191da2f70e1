#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "natal/classifier.hpp"
#include "natal/ingest.hpp"

namespace natal {

enum class SampleRatio { OneToOne, OneToTen, Natural };

const std::string& to_string(SampleRatio r);
SampleRatio ratio_from_string(const std::string& s);

// Keeps every minority (label 1) row, samples majority rows uniformly without
// replacement to the ratio's target count (capped at what is available), and
// shuffles the result deterministically by seed.
std::pair<FeatureMatrix, LabelVector> resample(const FeatureMatrix& m, const LabelVector& y,
                                               SampleRatio r, std::uint64_t seed);

struct FoldPlan {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<Eigen::Index>> folds;
};

// Folds partition all rows; each fold's minority count is within one of the
// even per-class split. Deterministic in (y, k, seed).
FoldPlan stratified_kfold(const LabelVector& y, int k, std::uint64_t seed);

struct GridSearchResult {
    int best_index = -1;
    // per grid point, per fold; NaN where the fit failed
    std::vector<std::vector<double>> fold_recall;
    std::vector<double> mean_recall;   // NaN for failed points
    std::vector<bool> failed;          // any fold failed -> point failed
    std::vector<std::string> failure_reason;
};

// Selects the grid point with the highest mean minority recall across folds;
// ties go to the first-declared point. Objective: recall at each model's own
// decision threshold on the held-out fold.
GridSearchResult grid_search(const std::vector<Learner>& grid,
                             const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                             const FoldPlan& plan);

}  // namespace natal
