#include "natal/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace natal {

namespace {
const std::array<std::string, 7> kFamilyNames = {"LAS", "RID", "LOG", "GNB", "SVM", "XGB", "NN"};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}
}  // namespace

const std::string& to_string(ModelFamily f) { return kFamilyNames[static_cast<int>(f)]; }

ModelFamily family_from_string(const std::string& s) {
    for (int i = 0; i < 7; ++i)
        if (kFamilyNames[i] == s) return static_cast<ModelFamily>(i);
    throw std::invalid_argument("unknown model family: " + s);
}

std::string ExperimentSpec::id() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(family) << '|' << to_string(subset) << '|' << to_string(ratio) << '|' << seed
       << '|';
    for (int y : train_years) os << y << ',';
    os << '|' << test_year << '|' << (race_filter ? to_string(*race_filter) : "all") << '|'
       << threshold << '|' << hyper.lasso_alpha << ',' << hyper.ridge_alpha << ','
       << hyper.logistic_l2 << ',' << hyper.gnb_eps << ',' << hyper.svm_gamma << ',' << hyper.svm_nu
       << ',' << hyper.svm_max_train_rows << '|' << hyper.gbt.max_depth << ','
       << hyper.gbt.min_child_weight << ',' << hyper.gbt.subsample << ',' << hyper.gbt.learning_rate
       << ',' << hyper.gbt.n_estimators << ',' << hyper.gbt.colsample_bytree << ','
       << hyper.gbt.lambda << ',' << hyper.gbt.gamma_split << ',' << hyper.gbt.base_score << '|'
       << hyper.mlp.hidden[0] << ',' << hyper.mlp.hidden[1] << ',' << hyper.mlp.hidden[2] << ','
       << hyper.mlp.epochs << ',' << hyper.mlp.batch_size << ',' << hyper.mlp.learning_rate;
    std::ostringstream hex;
    hex << std::hex << fnv1a(os.str());
    return to_string(family) + "_" + to_string(subset) + "_" +
           (ratio == SampleRatio::OneToOne ? "1to1" : ratio == SampleRatio::OneToTen ? "1to10" : "nat") +
           (race_filter ? "_" + to_string(*race_filter) : "") + "_" + hex.str();
}

Learner make_learner(const ExperimentSpec& spec) {
    const Hyper h = spec.hyper;
    const double thr = spec.threshold;
    const std::uint64_t seed = spec.seed;
    switch (spec.family) {
        case ModelFamily::LAS:
            return [h, thr](const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y) {
                LinearModel m = fit_lasso(X, y, h.lasso_alpha);
                m.threshold = thr;
                return m.as_classifier("LAS");
            };
        case ModelFamily::RID:
            return [h, thr](const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y) {
                LinearModel m = fit_ridge(X, y, h.ridge_alpha);
                m.threshold = thr;
                return m.as_classifier("RID");
            };
        case ModelFamily::LOG:
            return [h, thr](const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y) {
                LinearModel m = fit_logistic(X, y, h.logistic_l2);
                m.threshold = thr;
                return m.as_classifier("LOG");
            };
        case ModelFamily::GNB:
            return [h, thr](const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y) {
                GnbModel m = fit_gnb(X, y, h.gnb_eps);
                m.threshold = thr;
                return m.as_classifier("GNB");
            };
        case ModelFamily::SVM:
            // one-class model of the Survival (majority) class; outliers are
            // flagged as NotSurvival
            return [h, seed](const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y) {
                std::vector<Eigen::Index> majority;
                for (Eigen::Index i = 0; i < y.size(); ++i)
                    if (y(i) == 0.0) majority.push_back(i);
                if (majority.size() < 2) throw std::runtime_error("SVM: majority class too small");
                if (static_cast<long>(majority.size()) > h.svm_max_train_rows) {
                    std::mt19937_64 rng(seed ^ 0x5C5C5C5C5C5C5C5CULL);
                    std::shuffle(majority.begin(), majority.end(), rng);
                    majority.resize(static_cast<std::size_t>(h.svm_max_train_rows));
                    std::sort(majority.begin(), majority.end());
                }
                Eigen::MatrixXd Xm(static_cast<Eigen::Index>(majority.size()), X.cols());
                for (std::size_t i = 0; i < majority.size(); ++i)
                    Xm.row(static_cast<Eigen::Index>(i)) = X.row(majority[i]);
                OcsvmModel m = fit_ocsvm(Xm, h.svm_gamma, h.svm_nu);
                return m.as_classifier("SVM");
            };
        case ModelFamily::XGB:
            return [h, thr, seed](const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y) {
                GbtParams p = h.gbt;
                if (p.seed == 0) p.seed = seed;
                GbtModel m = fit_gbt(X, y, p);
                m.threshold = thr;
                return m.as_classifier("XGB");
            };
        case ModelFamily::NN:
            return [h, thr, seed](const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y) {
                MlpParams p = h.mlp;
                if (p.seed == 0) p.seed = seed;
                MlpModel m = fit_mlp(X, y, p);
                m.threshold = thr;
                return m.as_classifier("NN");
            };
    }
    throw std::logic_error("make_learner: unreachable");
}

namespace {

Dataset filter_by_race(const Dataset& ds, Race race) {
    Dataset out;
    out.schema = ds.schema;
    for (const auto& rec : ds.records)
        if (rec.outcome.race == race) out.records.push_back(rec);
    return out;
}

void fill_metadata(EvaluationReport& rep, const ExperimentSpec& spec, bool converged) {
    rep.metadata["family"] = to_string(spec.family);
    rep.metadata["subset"] = to_string(spec.subset);
    rep.metadata["ratio"] = to_string(spec.ratio);
    rep.metadata["seed"] = std::to_string(spec.seed);
    rep.metadata["threshold"] = std::to_string(spec.threshold);
    rep.metadata["test_year"] = std::to_string(spec.test_year);
    {
        std::string ys;
        for (int y : spec.train_years) ys += (ys.empty() ? "" : ",") + std::to_string(y);
        rep.metadata["train_years"] = ys;
    }
    rep.metadata["race_filter"] = spec.race_filter ? to_string(*spec.race_filter) : "all";
    rep.metadata["converged"] = converged ? "true" : "false";
    if (spec.family == ModelFamily::SVM)
        rep.metadata["svm_note"] = "one-class model fitted on Survival (majority); outliers -> NotSurvival";
    rep.metadata["imputation_note"] =
        "categorical missing values filled with the training mode, not a mean";
    rep.metadata["mortality_bins_note"] = "bins are left-closed right-open; 24h belongs to Days1To6";
}

}  // namespace

ExperimentResult run_binary(const ExperimentSpec& spec, const Dataset& train, const Dataset& test) {
    ExperimentResult res;
    res.spec = spec;
    auto t0 = std::chrono::steady_clock::now();
    std::string stage = "setup";
    try {
        Dataset tr = train, te = test;
        if (spec.race_filter) {
            tr = filter_by_race(tr, *spec.race_filter);
            te = filter_by_race(te, *spec.race_filter);
        }
        stage = "impute";
        Imputer imp = fit_imputer(tr);
        tr = apply_imputer(tr, imp);
        te = apply_imputer(te, imp);
        stage = "encode";
        auto [mtr, ytr] = encode(tr);
        auto [mte, yte] = encode(te);
        stage = "select_features";
        FeatureMatrix str = select_features(mtr, spec.subset);
        FeatureMatrix ste = select_features(mte, spec.subset);
        stage = "resample";
        auto [rtr, rytr] = resample(str, ytr, spec.ratio, spec.seed);
        stage = "fit";
        Classifier model = make_learner(spec)(rtr.X, rytr);
        res.converged = model.converged;
        stage = "evaluate";
        Eigen::VectorXd scores = model.score(ste.X);
        LabelVector pred(scores.size());
        for (Eigen::Index i = 0; i < scores.size(); ++i)
            pred(i) = scores(i) >= model.threshold ? 1.0 : 0.0;
        res.report.counts = confusion(yte, pred);
        auto [prec, rec] = precision_recall(res.report.counts);
        res.report.precision = prec;
        res.report.recall = rec;
        res.report.auc = roc_auc(scores, yte);
        res.report.n = static_cast<long>(yte.size());
        res.report.positive_rate = yte.sum() / static_cast<double>(yte.size());
        res.test_predictions.resize(static_cast<std::size_t>(pred.size()));
        for (Eigen::Index i = 0; i < pred.size(); ++i)
            res.test_predictions[static_cast<std::size_t>(i)] = pred(i) != 0.0 ? 1 : 0;
        fill_metadata(res.report, spec, res.converged);

        // degenerate-feature warning (e.g. a constant apgar column)
        for (Eigen::Index c = 0; c < str.X.cols(); ++c) {
            if ((str.X.col(c).array() == str.X(0, c)).all()) {
                res.report.metadata["warning"] =
                    "degenerate constant feature column: " + str.columns[static_cast<std::size_t>(c)].source;
                break;
            }
        }
    } catch (const std::exception& e) {
        res.error = "stage " + stage + ": " + e.what();
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

GridRunResult run_grid(const std::vector<ExperimentSpec>& specs, const Dataset& train,
                       const Dataset& test, int threads) {
    if (specs.empty()) throw std::invalid_argument("run_grid: empty spec list");
    GridRunResult out;
    out.results.resize(specs.size());
    if (threads > 1 && specs.size() > 1) {
        std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), specs.size());
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nt; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < specs.size(); i += nt)
                    out.results[i] = run_binary(specs[i], train, test);
            });
        for (auto& th : pool) th.join();
    } else {
        for (std::size_t i = 0; i < specs.size(); ++i)
            out.results[i] = run_binary(specs[i], train, test);
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& r = out.results[i];
        if (r.error) continue;
        const std::string key = to_string(specs[i].ratio);
        auto it = out.best_per_ratio.find(key);
        if (it == out.best_per_ratio.end()) {
            out.best_per_ratio[key] = static_cast<int>(i);
            continue;
        }
        const auto& cur = out.results[static_cast<std::size_t>(it->second)].report;
        if (r.report.auc > cur.auc || (r.report.auc == cur.auc && r.report.recall > cur.recall))
            it->second = static_cast<int>(i);
    }
    return out;
}

RaceRunResult run_race_models(const ExperimentSpec& spec, const Dataset& train, const Dataset& test,
                              long min_minority) {
    RaceRunResult out;
    for (int r = 0; r < kNumRaces; ++r) {
        Race race = static_cast<Race>(r);
        long train_n = 0, train_deaths = 0, test_n = 0, test_deaths = 0;
        for (const auto& rec : train.records)
            if (rec.outcome.race == race) {
                ++train_n;
                if (!rec.outcome.survived) ++train_deaths;
            }
        for (const auto& rec : test.records)
            if (rec.outcome.race == race) {
                ++test_n;
                if (!rec.outcome.survived) ++test_deaths;
            }
        if (train_n == 0 && test_n == 0) continue;
        if (train_deaths < min_minority) {
            out.skipped.emplace_back(race, "train minority count " + std::to_string(train_deaths) +
                                               " below minimum " + std::to_string(min_minority));
            continue;
        }
        if (test_deaths == 0 || test_n == test_deaths) {
            out.skipped.emplace_back(race, "test partition lacks both classes");
            continue;
        }
        ExperimentSpec s = spec;
        s.race_filter = race;
        out.results.emplace_back(race, run_binary(s, train, test));
    }
    return out;
}

void run_strata_reports(ExperimentResult& result, const Dataset& test) {
    if (result.test_predictions.size() != test.records.size())
        throw std::invalid_argument("run_strata_reports: prediction/test size mismatch");
    const auto n = static_cast<Eigen::Index>(test.records.size());
    LabelVector y(n), pred(n);
    std::vector<int> mort(static_cast<std::size_t>(n), -1);
    std::vector<int> cause(static_cast<std::size_t>(n), -1);
    long unlinked = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& rec = test.records[static_cast<std::size_t>(i)];
        y(i) = rec.outcome.survived ? 0.0 : 1.0;
        pred(i) = result.test_predictions[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
        if (!rec.outcome.survived) {
            mort[static_cast<std::size_t>(i)] =
                static_cast<int>(mortality_class(rec.outcome.age_at_death_hours));
            if (rec.outcome.cause)
                cause[static_cast<std::size_t>(i)] = static_cast<int>(*rec.outcome.cause);
            else
                ++unlinked;
        }
    }
    std::vector<std::string> mort_names, cause_names;
    for (int c = 0; c < kNumMortalityClasses; ++c)
        mort_names.push_back(to_string(static_cast<MortalityClass>(c)));
    for (int c = 0; c < kNumCauses; ++c) cause_names.push_back(to_string(static_cast<CauseOfDeath>(c)));
    result.report.mortality_table = stratified_recall(y, pred, mort, mort_names);

    // cause table over linked deaths only
    LabelVector y_linked = y;
    for (Eigen::Index i = 0; i < n; ++i)
        if (y(i) != 0.0 && cause[static_cast<std::size_t>(i)] < 0) y_linked(i) = 0.0;
    result.report.cause_table = stratified_recall(y_linked, pred, cause, cause_names);
    result.report.cause_unlinked_excluded = unlinked;
}

ImportanceResult run_importance(const ExperimentSpec& spec, const Dataset& train) {
    if (spec.family != ModelFamily::XGB)
        throw std::invalid_argument("run_importance: gain importance requires the XGB family");
    Imputer imp = fit_imputer(train);
    Dataset tr = apply_imputer(train, imp);
    auto [m, y] = encode(tr);
    FeatureMatrix sel = select_features(m, spec.subset);
    GbtParams p = spec.hyper.gbt;
    if (p.seed == 0) p.seed = spec.seed;
    GbtModel model = fit_gbt(sel.X, y, p);  // natural imbalance, no resampling
    ImportanceResult out;
    out.ranking = feature_importance(model, sel.columns);
    return out;
}

}  // namespace natal
