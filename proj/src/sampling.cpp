#include "natal/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "natal/metrics.hpp"

namespace natal {

namespace {
const std::array<std::string, 3> kRatioNames = {"1:1", "1:10", "natural"};
}

const std::string& to_string(SampleRatio r) { return kRatioNames[static_cast<int>(r)]; }

SampleRatio ratio_from_string(const std::string& s) {
    for (int i = 0; i < 3; ++i)
        if (kRatioNames[i] == s) return static_cast<SampleRatio>(i);
    if (s == "1:145") return SampleRatio::Natural;  // the natural imbalance alias
    throw std::invalid_argument("unknown sample ratio: " + s);
}

std::pair<FeatureMatrix, LabelVector> resample(const FeatureMatrix& m, const LabelVector& y,
                                               SampleRatio r, std::uint64_t seed) {
    std::vector<Eigen::Index> minority, majority;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        (y(i) != 0.0 ? minority : majority).push_back(i);
    if (minority.empty() || majority.empty())
        throw std::runtime_error("resample: both classes must be non-empty");

    std::size_t target = majority.size();
    if (r == SampleRatio::OneToOne) target = minority.size();
    else if (r == SampleRatio::OneToTen) target = 10 * minority.size();
    target = std::min(target, majority.size());

    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> kept = minority;
    if (target < majority.size()) {
        std::shuffle(majority.begin(), majority.end(), rng);
        majority.resize(target);
    }
    kept.insert(kept.end(), majority.begin(), majority.end());
    std::shuffle(kept.begin(), kept.end(), rng);

    FeatureMatrix out;
    out.columns = m.columns;
    out.X.resize(static_cast<Eigen::Index>(kept.size()), m.X.cols());
    LabelVector yo(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = m.X.row(kept[i]);
        yo(static_cast<Eigen::Index>(i)) = y(kept[i]);
    }
    return {std::move(out), std::move(yo)};
}

FoldPlan stratified_kfold(const LabelVector& y, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
    std::vector<Eigen::Index> cls[2];
    for (Eigen::Index i = 0; i < y.size(); ++i) cls[y(i) != 0.0 ? 1 : 0].push_back(i);
    for (int c = 0; c < 2; ++c)
        if (cls[c].size() < static_cast<std::size_t>(k))
            throw std::runtime_error("stratified_kfold: class " + std::to_string(c) +
                                     " has fewer than k members");

    std::mt19937_64 rng(seed);
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.folds.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < 2; ++c) {
        std::shuffle(cls[c].begin(), cls[c].end(), rng);
        for (std::size_t i = 0; i < cls[c].size(); ++i)
            plan.folds[i % static_cast<std::size_t>(k)].push_back(cls[c][i]);
    }
    for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
    return plan;
}

GridSearchResult grid_search(const std::vector<Learner>& grid,
                             const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                             const FoldPlan& plan) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
    const auto k = static_cast<std::size_t>(plan.k);
    GridSearchResult res;
    res.fold_recall.assign(grid.size(), std::vector<double>(k, std::numeric_limits<double>::quiet_NaN()));
    res.mean_recall.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    res.failed.assign(grid.size(), false);
    res.failure_reason.assign(grid.size(), "");

    // precompute per-fold train/validation row sets
    std::vector<std::vector<Eigen::Index>> val_rows(k), train_rows(k);
    for (std::size_t f = 0; f < k; ++f) {
        val_rows[f] = plan.folds[f];
        for (std::size_t g = 0; g < k; ++g)
            if (g != f)
                train_rows[f].insert(train_rows[f].end(), plan.folds[g].begin(), plan.folds[g].end());
    }

    auto take = [&](const std::vector<Eigen::Index>& rows, Eigen::MatrixXd& Xs, LabelVector& ys) {
        Xs.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
        ys.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Xs.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
            ys(static_cast<Eigen::Index>(i)) = y(rows[i]);
        }
    };

    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        for (std::size_t f = 0; f < k; ++f) {
            Eigen::MatrixXd Xtr, Xva;
            LabelVector ytr, yva;
            take(train_rows[f], Xtr, ytr);
            take(val_rows[f], Xva, yva);
            try {
                Classifier model = grid[g](Xtr, ytr);
                auto cc = confusion(yva, model.predict(Xva));
                double recall = precision_recall(cc).second;
                res.fold_recall[g][f] = recall;
                sum += recall;
            } catch (const std::exception& e) {
                res.failed[g] = true;
                res.failure_reason[g] = e.what();
            }
        }
        if (!res.failed[g]) res.mean_recall[g] = sum / static_cast<double>(k);
    }

    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (res.failed[g]) continue;
        if (res.best_index < 0 || res.mean_recall[g] > res.mean_recall[static_cast<std::size_t>(res.best_index)])
            res.best_index = static_cast<int>(g);
    }
    if (res.best_index < 0) throw std::runtime_error("grid_search: every grid point failed");
    return res;
}

}  // namespace natal
