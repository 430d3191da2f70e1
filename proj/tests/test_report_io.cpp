#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "natal/report_io.hpp"

using namespace natal;
using nlohmann::json;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path("/tmp/natal-report-test-" + name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_config(const TempDir& dir, const json& j, const std::string& name = "config.json") {
    std::ofstream out(dir.file(name));
    out << j.dump(2);
    return dir.file(name);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json minimal_config() {
    return {{"synth_preset", "mc-importance"},
            {"synth_n", 500},
            {"grid", json::array({{{"family", "LOG"}}})}};
}

ExperimentResult sample_result() {
    ExperimentResult res;
    res.spec.family = ModelFamily::XGB;
    res.spec.ratio = SampleRatio::OneToTen;
    res.report.precision = 0.25;
    res.report.recall = 0.75;
    res.report.auc = 0.9;
    res.report.counts = {3, 9, 100, 1};
    res.report.n = 113;
    res.report.positive_rate = 4.0 / 113.0;
    res.report.metadata["family"] = "XGB";
    res.report.mortality_table = {{"[0h, 1h)", 2, 2, 1.0}, {"[1h, 24h)", 0, 0, std::nullopt}};
    res.report.cause_table = {{"Gestation", 1, 1, 1.0}};
    res.report.cause_unlinked_excluded = 1;
    res.wall_seconds = 12.34;  // must never surface in the serialized report
    return res;
}

}  // namespace

TEST_CASE("spec json round trip preserves every field") {
    ExperimentSpec spec;
    spec.family = ModelFamily::NN;
    spec.subset = FeatureSubset::BwAp;
    spec.ratio = SampleRatio::Natural;
    spec.seed = 99;
    spec.train_years = {1995, 1996, 1997};
    spec.test_year = 1998;
    spec.race_filter = Race::Filipino;
    spec.threshold = 0.4;
    spec.hyper.mlp.hidden = {10, 5, 3};
    spec.hyper.mlp.epochs = 7;

    auto back = spec_from_json(spec_to_json(spec));
    CHECK(back.family == spec.family);
    CHECK(back.subset == spec.subset);
    CHECK(back.ratio == spec.ratio);
    CHECK(back.seed == spec.seed);
    CHECK(back.train_years == spec.train_years);
    CHECK(back.test_year == spec.test_year);
    CHECK(back.race_filter == spec.race_filter);
    CHECK(back.threshold == spec.threshold);
    CHECK(back.hyper.mlp.hidden == spec.hyper.mlp.hidden);
    CHECK(back.hyper.mlp.epochs == spec.hyper.mlp.epochs);
    CHECK(back.id() == spec.id());
}

TEST_CASE("spec_from_json: unknown keys and bad values are rejected") {
    CHECK_THROWS(spec_from_json(json{{"familly", "LOG"}}));
    CHECK_THROWS(spec_from_json(json{{"race_filter", "Martian"}}));
    CHECK_THROWS(spec_from_json(json{{"hyper", {{"gbt_depth", 3}}}}));
    CHECK_THROWS(spec_from_json(json{{"hyper", {{"mlp_hidden", {4, 2}}}}}));  // needs 3 widths
}

TEST_CASE("report files: versioned, timing-free, and byte stable") {
    TempDir dir("report");
    auto res = sample_result();
    write_report_file(res, dir.file("a.report"));
    write_report_file(res, dir.file("b.report"));
    CHECK(slurp(dir.file("a.report")) == slurp(dir.file("b.report")));

    json j = read_report_file(dir.file("a.report"));
    CHECK(j["format"] == kReportFormatVersion);
    CHECK(j["auc"] == 0.9);
    CHECK(j["confusion"]["tp"] == 3);
    CHECK(j["mortality_table"][1]["recall"].is_null());
    CHECK(j["cause_unlinked_excluded"] == 1);
    CHECK(slurp(dir.file("a.report")).find("12.34") == std::string::npos);
    CHECK(slurp(dir.file("a.report")).find("wall") == std::string::npos);

    // failed cells serialize the error and nothing stale
    ExperimentResult failed;
    failed.error = "stage fit: boom";
    write_report_file(failed, dir.file("err.report"));
    json e = read_report_file(dir.file("err.report"));
    CHECK(e["error"] == "stage fit: boom");
    CHECK(!e.contains("auc"));

    // version gate
    std::ofstream bad(dir.file("bad.report"));
    bad << json{{"format", "natal-report.v999"}}.dump(2);
    bad.close();
    CHECK_THROWS(read_report_file(dir.file("bad.report")));
}

TEST_CASE("load_run_config: minimal synth config and derived run id") {
    TempDir dir("config");
    auto path = write_config(dir, minimal_config());
    auto c = load_run_config(path);
    CHECK(c.synth_preset == "mc-importance");
    CHECK(c.synth_n == 500);
    REQUIRE(c.grid.size() == 1);
    CHECK(c.grid[0].family == ModelFamily::LOG);
    CHECK(c.run_id.rfind("run-", 0) == 0);

    // same content, same derived id; different content, different id
    auto again = load_run_config(write_config(dir, minimal_config(), "copy.json"));
    CHECK(again.run_id == c.run_id);
    json other = minimal_config();
    other["synth_n"] = 600;
    CHECK(load_run_config(write_config(dir, other, "other.json")).run_id != c.run_id);
}

TEST_CASE("load_run_config: grid cells inherit run-level defaults") {
    TempDir dir("defaults");
    json j = minimal_config();
    j["seed"] = 42;
    j["threshold"] = 0.3;
    j["train_years"] = {1995, 1996};
    j["test_year"] = 1997;
    j["grid"] = json::array({{{"family", "RID"}}, {{"family", "XGB"}, {"seed", 7}}});
    auto c = load_run_config(write_config(dir, j));
    REQUIRE(c.grid.size() == 2);
    CHECK(c.grid[0].seed == 42);
    CHECK(c.grid[0].threshold == 0.3);
    CHECK(c.grid[0].train_years == std::vector<int>{1995, 1996});
    CHECK(c.grid[0].test_year == 1997);
    CHECK(c.grid[1].seed == 7);  // cell override wins
}

TEST_CASE("load_run_config: structural validation") {
    TempDir dir("invalid");

    json unknown = minimal_config();
    unknown["colour"] = "blue";
    CHECK_THROWS(load_run_config(write_config(dir, unknown, "unknown.json")));

    // both sources at once
    json both = minimal_config();
    both["train_csv"] = "a.csv";
    both["test_csv"] = "b.csv";
    both["schema"] = "s.schema";
    CHECK_THROWS(load_run_config(write_config(dir, both, "both.json")));

    // CSV source requires the full triple
    json partial = {{"train_csv", "a.csv"}, {"grid", json::array({{{"family", "LOG"}}})}};
    CHECK_THROWS(load_run_config(write_config(dir, partial, "partial.json")));

    // neither grid nor cv
    json empty = {{"synth_preset", "mc-importance"}};
    CHECK_THROWS(load_run_config(write_config(dir, empty, "empty.json")));

    // cv block must list hyper points, and they are validated eagerly
    json cv = {{"synth_preset", "mc-importance"},
               {"cv", {{"family", "XGB"}, {"k", 3}, {"hyper_grid", json::array()}}}};
    CHECK_THROWS(load_run_config(write_config(dir, cv, "cv-empty.json")));
    json cv_bad = {{"synth_preset", "mc-importance"},
                   {"cv",
                    {{"family", "XGB"},
                     {"hyper_grid", json::array({{{"gbt_depth", 2}}})}}}};
    CHECK_THROWS(load_run_config(write_config(dir, cv_bad, "cv-bad.json")));

    json cv_ok = {{"synth_preset", "mc-importance"},
                  {"cv",
                   {{"family", "XGB"},
                    {"k", 3},
                    {"hyper_grid", json::array({{{"gbt_max_depth", 2}}, {{"gbt_max_depth", 4}}})}}}};
    auto c = load_run_config(write_config(dir, cv_ok, "cv-ok.json"));
    REQUIRE(c.cv);
    CHECK(c.cv->k == 3);
    CHECK(c.cv->base.family == ModelFamily::XGB);
    CHECK(c.cv->hyper_grid.size() == 2);
}

TEST_CASE("write_grid_outputs: one report per cell, summary, separate timings") {
    TempDir dir("outputs");
    RunConfig config;
    config.output_dir = dir.file("results");
    config.run_id = "test-run";

    GridRunResult grid;
    grid.results.push_back(sample_result());
    ExperimentResult failed;
    failed.spec.family = ModelFamily::SVM;
    failed.error = "stage fit: kernel too small";
    grid.results.push_back(failed);
    grid.best_per_ratio["1:10"] = 0;

    auto out = write_grid_outputs(grid, config);
    CHECK(out.directory == dir.file("results") + "/test-run");
    REQUIRE(out.report_paths.size() == 2);
    for (const auto& p : out.report_paths) CHECK(std::filesystem::exists(p));

    json summary = json::parse(slurp(out.directory + "/summary.json"));
    CHECK(summary["format"] == kReportFormatVersion);
    CHECK(summary["run_id"] == "test-run");
    REQUIRE(summary["cells"].size() == 2);
    CHECK(summary["cells"][0]["auc"] == 0.9);
    CHECK(summary["cells"][1].contains("error"));
    CHECK(summary["best_per_ratio"]["1:10"]["auc"] == 0.9);

    // timings live next to, not inside, the reports
    std::string timings = slurp(out.directory + "/timings.log");
    CHECK(timings.find(grid.results[0].spec.id()) != std::string::npos);
    CHECK(slurp(out.report_paths[0]).find("wall") == std::string::npos);

    // identical rerun produces byte-identical reports and summary
    auto first_report = slurp(out.report_paths[0]);
    auto first_summary = slurp(out.directory + "/summary.json");
    auto out2 = write_grid_outputs(grid, config);
    CHECK(slurp(out2.report_paths[0]) == first_report);
    CHECK(slurp(out2.directory + "/summary.json") == first_summary);
}

TEST_CASE("render_strata_table and render_cause_table") {
    auto j = report_to_json(sample_result());
    std::string strata = render_strata_table(j);
    CHECK(strata.find("mortality class") != std::string::npos);
    CHECK(strata.find("[0h, 1h)") != std::string::npos);
    CHECK(strata.find("1.000") != std::string::npos);
    CHECK(strata.find("N/A") != std::string::npos);

    std::string cause = render_cause_table(j);
    CHECK(cause.find("Gestation") != std::string::npos);
    CHECK(cause.find("unlinked deaths excluded: 1") != std::string::npos);

    json no_tables = {{"format", kReportFormatVersion}};
    CHECK_THROWS(render_strata_table(no_tables));
    CHECK_THROWS(render_cause_table(no_tables));
}

TEST_CASE("render_importance_table caps at top_n") {
    json imp;
    imp["ranking"] = json::array();
    for (int i = 0; i < 30; ++i)
        imp["ranking"].push_back(json::array({"feature_" + std::to_string(i), 30.0 - i}));
    std::string table = render_importance_table(imp, 20);
    CHECK(table.find("feature_0") != std::string::npos);
    CHECK(table.find("feature_19") != std::string::npos);
    CHECK(table.find("feature_20") == std::string::npos);
    CHECK_THROWS(render_importance_table(json::object()));
}

TEST_CASE("render_race_table lists fits and skips") {
    json summary;
    summary["race_models"] = json::array(
        {{{"race", "White"}, {"precision", 0.2}, {"recall", 0.8}, {"auc", 0.91}},
         {{"race", "Samoan"}, {"skipped", "train minority count 3 below minimum 50"}}});
    std::string table = render_race_table(summary);
    CHECK(table.find("White") != std::string::npos);
    CHECK(table.find("0.910") != std::string::npos);
    CHECK(table.find("skipped: train minority count 3") != std::string::npos);
    CHECK_THROWS(render_race_table(json::object()));
}
