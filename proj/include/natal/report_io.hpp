#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "natal/experiments.hpp"
#include "natal/synth.hpp"

namespace natal {

inline constexpr const char* kReportFormatVersion = "natal-report.v1";

nlohmann::json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j, const ExperimentSpec& defaults = {});

nlohmann::json report_to_json(const ExperimentResult& result);
// deterministic bytes: sorted keys, fixed indentation, no timing data
void write_report_file(const ExperimentResult& result, const std::string& path);
nlohmann::json read_report_file(const std::string& path);

struct RunConfig {
    // data source: either CSVs + schema, or a synth preset
    std::string train_csv, test_csv, schema_path;
    std::string synth_preset;
    long synth_n = 0;  // 0 -> preset default
    std::uint64_t synth_seed = 1;

    std::vector<int> train_years = {2000, 2001};
    int test_year = 2002;
    std::uint64_t seed = 1;
    double threshold = 0.5;
    int threads = 0;  // 0 -> hardware concurrency
    std::string output_dir = "results";
    std::string run_id;  // empty -> derived from config content
    std::vector<ExperimentSpec> grid;
    bool race_models = false;  // also fit per-race models for the first grid cell
    long race_min_minority = 50;
    bool importance = false;  // also write the gain-importance ranking (first XGB cell)

    // optional cross-validation block
    struct CvBlock {
        ExperimentSpec base;
        int k = 5;
        std::vector<nlohmann::json> hyper_grid;
    };
    std::optional<CvBlock> cv;
};

// parses and validates; unknown keys are rejected
RunConfig load_run_config(const std::string& path);

// writes one report per grid cell plus summary.json under
// <output_dir>/<run_id>/; timings go to a separate timings.log
struct GridOutput {
    std::string directory;
    std::vector<std::string> report_paths;
};
GridOutput write_grid_outputs(const GridRunResult& grid, const RunConfig& config);

// rendered plain-text tables for the report command
std::string render_strata_table(const nlohmann::json& report);
std::string render_cause_table(const nlohmann::json& report);
std::string render_importance_table(const nlohmann::json& importance, int top_n = 20);
std::string render_race_table(const nlohmann::json& summary);

}  // namespace natal
