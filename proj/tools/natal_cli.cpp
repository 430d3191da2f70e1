// natal: imbalanced birth-outcome classification toolkit.
//
// Subcommands:
//   synth        generate a synthetic dataset (CSV + oracle sidecar + manifest)
//   run          execute an experiment grid from a config file
//   cv           stratified k-fold hyperparameter search from a config file
//   report       render strata/cause/race/importance tables from run outputs
//   check-config validate a config file without running anything
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "natal/report_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int effective_threads(int requested) {
    if (const char* env = std::getenv("NATAL_THREADS")) requested = std::atoi(env);
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

std::string effective_output_dir(const std::string& configured) {
    if (const char* env = std::getenv("NATAL_OUTPUT_DIR")) return env;
    return configured;
}

struct LoadedData {
    natal::Dataset train, test;
};

LoadedData load_data(const natal::RunConfig& config) {
    LoadedData d;
    if (!config.synth_preset.empty()) {
        natal::SynthPreset preset = natal::synth_preset(config.synth_preset);
        preset.config.intercept =
            natal::calibrate_intercept(preset.config, 200000, config.synth_seed);
        long n = config.synth_n > 0 ? config.synth_n : preset.default_n;
        natal::SyntheticDataset sd = natal::generate(n, preset.config, config.synth_seed);
        auto split = natal::split_by_year(sd.data, {config.train_years.begin(), config.train_years.end()},
                                          config.test_year);
        d.train = std::move(split.train);
        d.test = std::move(split.test);
    } else {
        natal::FeatureSchema schema = natal::FeatureSchema::load(config.schema_path);
        d.train = natal::parse_csv(config.train_csv, schema);
        d.test = natal::parse_csv(config.test_csv, schema);
    }
    return d;
}

int cmd_synth(const std::string& preset_name, long n, std::uint64_t seed,
              const std::string& out_dir) {
    natal::SynthPreset preset = natal::synth_preset(preset_name);
    preset.config.intercept = natal::calibrate_intercept(preset.config, 200000, seed);
    if (n <= 0) n = preset.default_n;
    natal::SyntheticDataset ds = natal::generate(n, preset.config, seed);

    fs::create_directories(out_dir);
    fs::path base = fs::path(out_dir) / preset_name;
    std::string csv_path = base.string() + ".csv";
    std::string oracle_path = base.string() + ".oracle.csv";
    std::string schema_path = base.string() + ".schema";
    std::string manifest_path = base.string() + ".manifest.json";

    natal::write_csv(ds.data, csv_path);
    natal::write_oracle(ds, oracle_path);
    preset.config.schema.save(schema_path);

    json manifest;
    manifest["preset"] = preset.config.name;
    manifest["n"] = n;
    manifest["seed"] = seed;
    manifest["config_hash"] = ds.config_hash;
    manifest["intercept"] = preset.config.intercept;
    manifest["target_rate"] = preset.config.target_rate;
    manifest["bayes_auc"] = natal::bayes_auc(ds);
    manifest["files"] = {fs::path(csv_path).filename().string(),
                         fs::path(oracle_path).filename().string(),
                         fs::path(schema_path).filename().string()};
    manifest["note"] =
        "mortality-class conditional distribution is a configurable placeholder, not ground truth";
    std::ofstream mf(manifest_path);
    mf << manifest.dump(2) << '\n';

    std::cout << "wrote " << csv_path << '\n'
              << "wrote " << oracle_path << '\n'
              << "wrote " << schema_path << '\n'
              << "wrote " << manifest_path << '\n';
    return 0;
}

int cmd_run(const std::string& config_path, bool dry_run) {
    natal::RunConfig config = natal::load_run_config(config_path);
    config.output_dir = effective_output_dir(config.output_dir);
    int threads = effective_threads(config.threads);
    for (auto& spec : config.grid) spec.hyper.gbt.threads = 1;  // grid cells parallelize instead

    if (dry_run) {
        std::cout << "run_id: " << config.run_id << "\noutput: "
                  << (fs::path(config.output_dir) / config.run_id).string() << "\nthreads: " << threads
                  << "\ncells:\n";
        for (const auto& spec : config.grid) std::cout << "  " << spec.id() << '\n';
        return 0;
    }

    LoadedData data = load_data(config);
    natal::GridRunResult grid = natal::run_grid(config.grid, data.train, data.test, threads);
    for (auto& result : grid.results)
        if (!result.error) natal::run_strata_reports(result, data.test);
    natal::GridOutput out = natal::write_grid_outputs(grid, config);

    if (config.race_models && !config.grid.empty()) {
        natal::RaceRunResult races =
            natal::run_race_models(config.grid.front(), data.train, data.test, config.race_min_minority);
        json rj;
        rj["race_models"] = json::array();
        for (const auto& [race, result] : races.results) {
            json row;
            row["race"] = natal::to_string(race);
            if (result.error) {
                row["skipped"] = *result.error;
            } else {
                row["precision"] = result.report.precision;
                row["recall"] = result.report.recall;
                row["auc"] = result.report.auc;
            }
            rj["race_models"].push_back(std::move(row));
        }
        for (const auto& [race, reason] : races.skipped)
            rj["race_models"].push_back({{"race", natal::to_string(race)}, {"skipped", reason}});
        std::ofstream rf(fs::path(out.directory) / "race.json");
        rf << rj.dump(2) << '\n';
    }

    if (config.importance) {
        const natal::ExperimentSpec* xgb = nullptr;
        for (const auto& spec : config.grid)
            if (spec.family == natal::ModelFamily::XGB) {
                xgb = &spec;
                break;
            }
        if (xgb) {
            natal::ImportanceResult imp = natal::run_importance(*xgb, data.train);
            json ij;
            ij["ranking"] = json::array();
            for (const auto& [name, gain] : imp.ranking) ij["ranking"].push_back({name, gain});
            std::ofstream inf(fs::path(out.directory) / "importance.json");
            inf << ij.dump(2) << '\n';
        }
    }

    int ok = 0, failed = 0;
    for (const auto& result : grid.results) {
        if (result.error) {
            ++failed;
            std::cerr << "FAILED " << result.spec.id() << ": " << *result.error << '\n';
        } else {
            ++ok;
            std::cout << result.spec.id() << "  precision=" << result.report.precision
                      << " recall=" << result.report.recall << " auc=" << result.report.auc << '\n';
        }
    }
    std::cout << "reports written to " << out.directory << '\n';
    return ok > 0 ? 0 : 1;
}

int cmd_cv(const std::string& config_path) {
    natal::RunConfig config = natal::load_run_config(config_path);
    if (!config.cv) {
        std::cerr << "config has no cv block\n";
        return 2;
    }
    LoadedData data = load_data(config);

    natal::Imputer imp = natal::fit_imputer(data.train);
    natal::Dataset tr = natal::apply_imputer(data.train, imp);
    auto [m, y] = natal::encode(tr);
    natal::FeatureMatrix sel = natal::select_features(m, config.cv->base.subset);
    auto [rm, ry] = natal::resample(sel, y, config.cv->base.ratio, config.cv->base.seed);

    std::vector<natal::Learner> grid;
    std::vector<natal::ExperimentSpec> specs;
    for (const auto& hj : config.cv->hyper_grid) {
        json cell;
        cell["hyper"] = hj;
        natal::ExperimentSpec spec = natal::spec_from_json(cell, config.cv->base);
        spec.hyper.gbt.threads = 1;
        specs.push_back(spec);
        grid.push_back(natal::make_learner(spec));
    }
    natal::FoldPlan plan = natal::stratified_kfold(ry, config.cv->k, config.cv->base.seed);
    natal::GridSearchResult res = natal::grid_search(grid, rm.X, ry, plan);

    std::cout << "cv objective: mean minority recall over " << config.cv->k << " folds\n";
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::cout << (static_cast<int>(g) == res.best_index ? "* " : "  ") << "point " << g << " "
                  << config.cv->hyper_grid[g].dump() << " -> ";
        if (res.failed[g]) {
            std::cout << "FAILED: " << res.failure_reason[g] << '\n';
        } else {
            std::cout << "mean recall " << res.mean_recall[g] << " (folds:";
            for (double r : res.fold_recall[g]) std::cout << ' ' << r;
            std::cout << ")\n";
        }
    }
    std::cout << "best point: " << res.best_index << '\n';
    return 0;
}

int cmd_report(const std::string& kind, const std::string& path) {
    fs::path p(path);
    auto report_from = [&](const std::string& fallback) -> json {
        if (fs::is_directory(p)) {
            // pick the best cell from the run summary
            std::ifstream sf(p / "summary.json");
            if (!sf) throw std::runtime_error("no summary.json under " + path);
            json summary = json::parse(sf);
            std::string best_file;
            double best_auc = -1.0;
            for (const auto& cell : summary["cells"]) {
                if (cell.contains("error")) continue;
                if (cell["auc"].get<double>() > best_auc) {
                    best_auc = cell["auc"].get<double>();
                    best_file = cell["file"].get<std::string>();
                }
            }
            if (best_file.empty()) throw std::runtime_error("no successful cells in " + path);
            (void)fallback;
            return natal::read_report_file((p / best_file).string());
        }
        return natal::read_report_file(path);
    };

    if (kind == "strata") {
        std::cout << natal::render_strata_table(report_from("strata"));
    } else if (kind == "cause") {
        std::cout << natal::render_cause_table(report_from("cause"));
    } else if (kind == "race") {
        fs::path rf = fs::is_directory(p) ? p / "race.json" : p;
        std::ifstream in(rf);
        if (!in) throw std::runtime_error("cannot open " + rf.string());
        std::cout << natal::render_race_table(json::parse(in));
    } else if (kind == "importance") {
        fs::path inf = fs::is_directory(p) ? p / "importance.json" : p;
        std::ifstream in(inf);
        if (!in) throw std::runtime_error("cannot open " + inf.string());
        std::cout << natal::render_importance_table(json::parse(in));
    } else {
        std::cerr << "unknown report kind '" << kind << "' (expected strata|cause|race|importance)\n";
        return 2;
    }
    return 0;
}

int cmd_check_config(const std::string& config_path) {
    natal::RunConfig config = natal::load_run_config(config_path);
    std::cout << "config ok: run_id " << config.run_id << ", " << config.grid.size() << " grid cells"
              << (config.cv ? ", cv block present" : "") << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"imbalanced birth-outcome classification toolkit"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    std::string preset_name;
    long synth_n = 0;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "data";
    synth->add_option("--preset", preset_name, "preset name")->required();
    synth->add_option("--n", synth_n, "record count (0 = preset default)");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("-o,--out", synth_out, "output directory");

    auto* run = app.add_subcommand("run", "execute an experiment grid");
    std::string run_config;
    bool dry_run = false;
    run->add_option("config", run_config, "run config file")->required();
    run->add_flag("--dry-run", dry_run, "print the resolved grid, write nothing");

    auto* cv = app.add_subcommand("cv", "stratified k-fold hyperparameter search");
    std::string cv_config;
    cv->add_option("config", cv_config, "run config file with a cv block")->required();

    auto* report = app.add_subcommand("report", "render tables from run outputs");
    std::string report_kind, report_path;
    report->add_option("kind", report_kind, "strata|cause|race|importance")->required();
    report->add_option("path", report_path, "run directory or report file")->required();

    auto* check = app.add_subcommand("check-config", "validate a config file");
    std::string check_path;
    check->add_option("config", check_path, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            try {
                return cmd_synth(preset_name, synth_n, synth_seed, synth_out);
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\navailable presets:";
                for (const auto& n : natal::synth_preset_names()) std::cerr << ' ' << n;
                std::cerr << '\n';
                return 2;
            }
        }
        if (run->parsed()) return cmd_run(run_config, dry_run);
        if (cv->parsed()) return cmd_cv(cv_config);
        if (report->parsed()) return cmd_report(report_kind, report_path);
        if (check->parsed()) {
            try {
                return cmd_check_config(check_path);
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << '\n';
                return 2;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
