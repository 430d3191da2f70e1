#include "natal/report_io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace natal {

using nlohmann::json;

namespace {

json stratum_table_to_json(const std::vector<StratumRow>& table) {
    json arr = json::array();
    for (const auto& row : table) {
        json r;
        r["stratum"] = row.stratum;
        r["deaths"] = row.deaths;
        r["caught"] = row.caught;
        if (row.recall)
            r["recall"] = *row.recall;
        else
            r["recall"] = nullptr;  // N/A
        arr.push_back(std::move(r));
    }
    return arr;
}

std::vector<StratumRow> stratum_table_from_json(const json& arr) {
    std::vector<StratumRow> out;
    for (const auto& r : arr) {
        StratumRow row;
        row.stratum = r.at("stratum").get<std::string>();
        row.deaths = r.at("deaths").get<long>();
        row.caught = r.at("caught").get<long>();
        if (!r.at("recall").is_null()) row.recall = r.at("recall").get<double>();
        out.push_back(std::move(row));
    }
    return out;
}

void apply_hyper(Hyper& h, const json& j) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "lasso_alpha") h.lasso_alpha = it->get<double>();
        else if (k == "ridge_alpha") h.ridge_alpha = it->get<double>();
        else if (k == "logistic_l2") h.logistic_l2 = it->get<double>();
        else if (k == "gnb_eps") h.gnb_eps = it->get<double>();
        else if (k == "svm_gamma") h.svm_gamma = it->get<double>();
        else if (k == "svm_nu") h.svm_nu = it->get<double>();
        else if (k == "svm_max_train_rows") h.svm_max_train_rows = it->get<long>();
        else if (k == "gbt_max_depth") h.gbt.max_depth = it->get<int>();
        else if (k == "gbt_min_child_weight") h.gbt.min_child_weight = it->get<double>();
        else if (k == "gbt_subsample") h.gbt.subsample = it->get<double>();
        else if (k == "gbt_learning_rate") h.gbt.learning_rate = it->get<double>();
        else if (k == "gbt_n_estimators") h.gbt.n_estimators = it->get<int>();
        else if (k == "gbt_colsample_bytree") h.gbt.colsample_bytree = it->get<double>();
        else if (k == "gbt_lambda") h.gbt.lambda = it->get<double>();
        else if (k == "gbt_gamma_split") h.gbt.gamma_split = it->get<double>();
        else if (k == "gbt_base_score") h.gbt.base_score = it->get<double>();
        else if (k == "mlp_hidden") {
            auto v = it->get<std::vector<int>>();
            if (v.size() != 3) throw std::runtime_error("config: mlp_hidden must list exactly 3 widths");
            h.mlp.hidden = {v[0], v[1], v[2]};
        } else if (k == "mlp_epochs") h.mlp.epochs = it->get<int>();
        else if (k == "mlp_batch_size") h.mlp.batch_size = it->get<int>();
        else if (k == "mlp_learning_rate") h.mlp.learning_rate = it->get<double>();
        else if (k == "mlp_init_scale") h.mlp.init_scale = it->get<double>();
        else throw std::runtime_error("config: unknown hyperparameter key '" + k + "'");
    }
}

json hyper_to_json(const Hyper& h, ModelFamily family) {
    json j;
    switch (family) {
        case ModelFamily::LAS: j["lasso_alpha"] = h.lasso_alpha; break;
        case ModelFamily::RID: j["ridge_alpha"] = h.ridge_alpha; break;
        case ModelFamily::LOG: j["logistic_l2"] = h.logistic_l2; break;
        case ModelFamily::GNB: j["gnb_eps"] = h.gnb_eps; break;
        case ModelFamily::SVM:
            j["svm_gamma"] = h.svm_gamma;
            j["svm_nu"] = h.svm_nu;
            j["svm_max_train_rows"] = h.svm_max_train_rows;
            break;
        case ModelFamily::XGB:
            j["gbt_max_depth"] = h.gbt.max_depth;
            j["gbt_min_child_weight"] = h.gbt.min_child_weight;
            j["gbt_subsample"] = h.gbt.subsample;
            j["gbt_learning_rate"] = h.gbt.learning_rate;
            j["gbt_n_estimators"] = h.gbt.n_estimators;
            j["gbt_colsample_bytree"] = h.gbt.colsample_bytree;
            j["gbt_lambda"] = h.gbt.lambda;
            j["gbt_gamma_split"] = h.gbt.gamma_split;
            j["gbt_base_score"] = h.gbt.base_score;
            break;
        case ModelFamily::NN:
            j["mlp_hidden"] = {h.mlp.hidden[0], h.mlp.hidden[1], h.mlp.hidden[2]};
            j["mlp_epochs"] = h.mlp.epochs;
            j["mlp_batch_size"] = h.mlp.batch_size;
            j["mlp_learning_rate"] = h.mlp.learning_rate;
            break;
    }
    return j;
}

}  // namespace

json spec_to_json(const ExperimentSpec& spec) {
    json j;
    j["family"] = to_string(spec.family);
    j["subset"] = to_string(spec.subset);
    j["ratio"] = to_string(spec.ratio);
    j["seed"] = spec.seed;
    j["train_years"] = spec.train_years;
    j["test_year"] = spec.test_year;
    j["threshold"] = spec.threshold;
    if (spec.race_filter) j["race_filter"] = to_string(*spec.race_filter);
    j["hyper"] = hyper_to_json(spec.hyper, spec.family);
    return j;
}

ExperimentSpec spec_from_json(const json& j, const ExperimentSpec& defaults) {
    ExperimentSpec spec = defaults;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "family") spec.family = family_from_string(it->get<std::string>());
        else if (k == "subset") spec.subset = subset_from_string(it->get<std::string>());
        else if (k == "ratio") spec.ratio = ratio_from_string(it->get<std::string>());
        else if (k == "seed") spec.seed = it->get<std::uint64_t>();
        else if (k == "train_years") spec.train_years = it->get<std::vector<int>>();
        else if (k == "test_year") spec.test_year = it->get<int>();
        else if (k == "threshold") spec.threshold = it->get<double>();
        else if (k == "race_filter") {
            auto r = race_from_string(it->get<std::string>());
            if (!r) throw std::runtime_error("config: unknown race '" + it->get<std::string>() + "'");
            spec.race_filter = r;
        } else if (k == "hyper") apply_hyper(spec.hyper, *it);
        else throw std::runtime_error("config: unknown grid cell key '" + k + "'");
    }
    return spec;
}

json report_to_json(const ExperimentResult& result) {
    json j;
    j["format"] = kReportFormatVersion;
    j["spec"] = spec_to_json(result.spec);
    j["spec_id"] = result.spec.id();
    if (result.error) {
        j["error"] = *result.error;
        return j;
    }
    const EvaluationReport& r = result.report;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["auc"] = r.auc;
    j["confusion"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}};
    j["n"] = r.n;
    j["positive_rate"] = r.positive_rate;
    j["converged"] = result.converged;
    j["metadata"] = r.metadata;
    if (!r.mortality_table.empty()) j["mortality_table"] = stratum_table_to_json(r.mortality_table);
    if (!r.cause_table.empty()) {
        j["cause_table"] = stratum_table_to_json(r.cause_table);
        j["cause_unlinked_excluded"] = r.cause_unlinked_excluded;
    }
    return j;
}

void write_report_file(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report file: " + path);
    out << report_to_json(result).dump(2) << '\n';
}

json read_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report file: " + path);
    json j = json::parse(in);
    if (!j.contains("format") || j["format"] != kReportFormatVersion)
        throw std::runtime_error(path + ": report format/version mismatch");
    return j;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    RunConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "train_csv") c.train_csv = it->get<std::string>();
        else if (k == "test_csv") c.test_csv = it->get<std::string>();
        else if (k == "schema") c.schema_path = it->get<std::string>();
        else if (k == "synth_preset") c.synth_preset = it->get<std::string>();
        else if (k == "synth_n") c.synth_n = it->get<long>();
        else if (k == "synth_seed") c.synth_seed = it->get<std::uint64_t>();
        else if (k == "train_years") c.train_years = it->get<std::vector<int>>();
        else if (k == "test_year") c.test_year = it->get<int>();
        else if (k == "seed") c.seed = it->get<std::uint64_t>();
        else if (k == "threshold") c.threshold = it->get<double>();
        else if (k == "threads") c.threads = it->get<int>();
        else if (k == "output_dir") c.output_dir = it->get<std::string>();
        else if (k == "run_id") c.run_id = it->get<std::string>();
        else if (k == "race_models") c.race_models = it->get<bool>();
        else if (k == "race_min_minority") c.race_min_minority = it->get<long>();
        else if (k == "importance") c.importance = it->get<bool>();
        else if (k == "grid") {
            // keys below are not part of the cell schema
        } else if (k == "cv") {
        } else {
            throw std::runtime_error("config: unknown key '" + k + "'");
        }
    }
    ExperimentSpec defaults;
    defaults.seed = c.seed;
    defaults.train_years = c.train_years;
    defaults.test_year = c.test_year;
    defaults.threshold = c.threshold;
    if (j.contains("grid")) {
        for (const auto& cell : j["grid"]) c.grid.push_back(spec_from_json(cell, defaults));
    }
    if (j.contains("cv")) {
        const json& cv = j["cv"];
        RunConfig::CvBlock block;
        block.base = defaults;
        for (auto it = cv.begin(); it != cv.end(); ++it) {
            const std::string& k = it.key();
            if (k == "k") block.k = it->get<int>();
            else if (k == "hyper_grid") {
                for (const auto& g : *it) block.hyper_grid.push_back(g);
            } else if (k == "family" || k == "subset" || k == "ratio" || k == "seed" ||
                       k == "threshold") {
                json one;
                one[k] = *it;
                block.base = spec_from_json(one, block.base);
            } else {
                throw std::runtime_error("config: unknown cv key '" + k + "'");
            }
        }
        if (block.hyper_grid.empty()) throw std::runtime_error("config: cv.hyper_grid must be non-empty");
        // validate hyper keys up front
        for (const auto& g : block.hyper_grid) {
            Hyper probe = block.base.hyper;
            apply_hyper(probe, g);
        }
        c.cv = std::move(block);
    }
    bool has_csv = !c.train_csv.empty() || !c.test_csv.empty();
    bool has_synth = !c.synth_preset.empty();
    if (has_csv == has_synth)
        throw std::runtime_error("config: provide either train_csv/test_csv/schema or synth_preset");
    if (has_csv && (c.train_csv.empty() || c.test_csv.empty() || c.schema_path.empty()))
        throw std::runtime_error("config: train_csv, test_csv and schema are all required together");
    if (c.grid.empty() && !c.cv)
        throw std::runtime_error("config: grid (or cv) must define at least one cell");
    if (c.run_id.empty()) {
        std::uint64_t h = 14695981039346656037ULL;
        std::string s = j.dump();
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
        std::ostringstream os;
        os << "run-" << std::hex << h;
        c.run_id = os.str();
    }
    return c;
}

GridOutput write_grid_outputs(const GridRunResult& grid, const RunConfig& config) {
    namespace fs = std::filesystem;
    GridOutput out;
    fs::path dir = fs::path(config.output_dir) / config.run_id;
    fs::create_directories(dir);
    out.directory = dir.string();

    json summary;
    summary["format"] = kReportFormatVersion;
    summary["run_id"] = config.run_id;
    summary["cells"] = json::array();
    for (const auto& result : grid.results) {
        fs::path p = dir / (result.spec.id() + ".report");
        write_report_file(result, p.string());
        out.report_paths.push_back(p.string());
        json cell;
        cell["spec_id"] = result.spec.id();
        cell["file"] = p.filename().string();
        if (result.error) {
            cell["error"] = *result.error;
        } else {
            cell["precision"] = result.report.precision;
            cell["recall"] = result.report.recall;
            cell["auc"] = result.report.auc;
        }
        summary["cells"].push_back(std::move(cell));
    }
    json best;
    for (const auto& [ratio, idx] : grid.best_per_ratio) {
        const auto& r = grid.results[static_cast<std::size_t>(idx)];
        best[ratio] = {{"spec_id", r.spec.id()},
                       {"family", to_string(r.spec.family)},
                       {"subset", to_string(r.spec.subset)},
                       {"precision", r.report.precision},
                       {"recall", r.report.recall},
                       {"auc", r.report.auc}};
    }
    summary["best_per_ratio"] = std::move(best);
    std::ofstream sf(dir / "summary.json");
    sf << summary.dump(2) << '\n';

    std::ofstream tf(dir / "timings.log");
    for (const auto& result : grid.results)
        tf << result.spec.id() << ' ' << result.wall_seconds << "s\n";
    return out;
}

namespace {

std::string fmt3(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
}

std::string render_stratum_rows(const json& table, const std::string& heading) {
    std::size_t w = heading.size();
    for (const auto& row : table) w = std::max(w, row.at("stratum").get<std::string>().size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(w + 2)) << heading << std::right << std::setw(8)
       << "deaths" << std::setw(8) << "caught" << std::setw(8) << "recall" << '\n';
    for (const auto& row : table) {
        os << std::left << std::setw(static_cast<int>(w + 2)) << row.at("stratum").get<std::string>()
           << std::right << std::setw(8) << row.at("deaths").get<long>() << std::setw(8)
           << row.at("caught").get<long>() << std::setw(8)
           << (row.at("recall").is_null() ? std::string("N/A") : fmt3(row.at("recall").get<double>()))
           << '\n';
    }
    return os.str();
}

}  // namespace

std::string render_strata_table(const json& report) {
    if (!report.contains("mortality_table"))
        throw std::runtime_error("report has no mortality-class table");
    return render_stratum_rows(report["mortality_table"], "mortality class");
}

std::string render_cause_table(const json& report) {
    if (!report.contains("cause_table")) throw std::runtime_error("report has no cause table");
    std::string s = render_stratum_rows(report["cause_table"], "cause of death");
    if (report.contains("cause_unlinked_excluded"))
        s += "unlinked deaths excluded: " + std::to_string(report["cause_unlinked_excluded"].get<long>()) +
             "\n";
    return s;
}

std::string render_importance_table(const json& importance, int top_n) {
    if (!importance.contains("ranking")) throw std::runtime_error("importance file has no ranking");
    const auto& ranking = importance["ranking"];
    std::size_t w = 7;
    for (const auto& row : ranking) w = std::max(w, row.at(0).get<std::string>().size());
    std::ostringstream os;
    os << std::left << std::setw(6) << "rank" << std::setw(static_cast<int>(w + 2)) << "feature"
       << std::right << std::setw(14) << "total gain" << '\n';
    int rank = 0;
    for (const auto& row : ranking) {
        if (++rank > top_n) break;
        os << std::left << std::setw(6) << rank << std::setw(static_cast<int>(w + 2))
           << row.at(0).get<std::string>() << std::right << std::setw(14)
           << fmt3(row.at(1).get<double>()) << '\n';
    }
    return os.str();
}

std::string render_race_table(const json& summary) {
    if (!summary.contains("race_models")) throw std::runtime_error("summary has no race model results");
    std::ostringstream os;
    os << std::left << std::setw(16) << "race" << std::right << std::setw(10) << "precision"
       << std::setw(10) << "recall" << std::setw(10) << "auc" << '\n';
    for (const auto& row : summary["race_models"]) {
        os << std::left << std::setw(16) << row.at("race").get<std::string>();
        if (row.contains("skipped"))
            os << "  skipped: " << row.at("skipped").get<std::string>() << '\n';
        else
            os << std::right << std::setw(10) << fmt3(row.at("precision").get<double>())
               << std::setw(10) << fmt3(row.at("recall").get<double>()) << std::setw(10)
               << fmt3(row.at("auc").get<double>()) << '\n';
    }
    return os.str();
}

}  // namespace natal
