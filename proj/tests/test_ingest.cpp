#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "natal/ingest.hpp"

using namespace natal;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

const char* kHeader = "birth_weight_grams,apgar_score,delivery,year,survived,age_at_death_hours,cause,race\n";

}  // namespace

TEST_CASE("parse_csv: valid rows become records, empty fields become missing") {
    auto path = write_temp("natal_ok.csv",
                           std::string(kHeader) +
                               "3300,9,Vaginal,2000,1,,,White\n"
                               ",8,Cesarean,2001,1,,,Black\n"
                               "900,2,Vaginal,2002,0,3.5,Other,White\n");
    auto ds = parse_csv(path, testutil::tiny_schema());
    REQUIRE(ds.records.size() == 3);
    CHECK(ds.records[0].values[0] == 3300.0);
    CHECK(is_missing(ds.records[1].values[0]));
    CHECK(ds.records[1].outcome.race == Race::Black);
    CHECK(!ds.records[2].outcome.survived);
    CHECK(ds.records[2].outcome.age_at_death_hours == 3.5);
    CHECK(ds.records[2].outcome.cause == CauseOfDeath::Other);
    std::filesystem::remove(path);
}

TEST_CASE("parse_csv: unknown category cites line and feature") {
    auto path = write_temp("natal_badcat.csv",
                           std::string(kHeader) + "3300,9,Sideways,2000,1,,,White\n");
    try {
        parse_csv(path, testutil::tiny_schema());
        FAIL("expected a parse error");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("delivery") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("parse_csv: age_at_death_days converts x24") {
    auto path = write_temp(
        "natal_days.csv",
        "birth_weight_grams,apgar_score,delivery,year,survived,age_at_death_days,cause,race\n"
        "900,2,Vaginal,2002,0,2,Other,White\n");
    auto ds = parse_csv(path, testutil::tiny_schema());
    REQUIRE(ds.records.size() == 1);
    CHECK(ds.records[0].outcome.age_at_death_hours == 48.0);
    std::filesystem::remove(path);
}

TEST_CASE("parse_csv: header mismatch and malformed numerics are errors") {
    auto bad_header = write_temp("natal_badhdr.csv", "not_a_feature,year,survived,age_at_death_hours,race\n");
    CHECK_THROWS(parse_csv(bad_header, testutil::tiny_schema()));
    auto bad_num = write_temp("natal_badnum.csv",
                              std::string(kHeader) + "heavy,9,Vaginal,2000,1,,,White\n");
    CHECK_THROWS(parse_csv(bad_num, testutil::tiny_schema()));
    std::filesystem::remove(bad_header);
    std::filesystem::remove(bad_num);
}

TEST_CASE("csv round trip preserves records") {
    Dataset ds;
    ds.schema = testutil::tiny_schema();
    ds.records.push_back(testutil::tiny_record(3300.25, 9, 0, 2000, true));
    ds.records.push_back(testutil::tiny_record(kMissing, 8, 1, 2001, true, kMissing, std::nullopt,
                                               Race::Vietnamese));
    ds.records.push_back(
        testutil::tiny_record(900, 2, 0, 2002, false, 3.5, CauseOfDeath::MaternalFactors));
    auto path = (std::filesystem::temp_directory_path() / "natal_rt.csv").string();
    write_csv(ds, path);
    auto back = parse_csv(path, ds.schema);
    REQUIRE(back.records.size() == ds.records.size());
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const auto& a = ds.records[i];
        const auto& b = back.records[i];
        for (std::size_t f = 0; f < a.values.size(); ++f) {
            if (is_missing(a.values[f]))
                CHECK(is_missing(b.values[f]));
            else
                CHECK(a.values[f] == b.values[f]);
        }
        CHECK(a.year == b.year);
        CHECK(a.outcome.survived == b.outcome.survived);
        CHECK(a.outcome.cause == b.outcome.cause);
        CHECK(a.outcome.race == b.outcome.race);
    }
    std::filesystem::remove(path);
}

TEST_CASE("fit_imputer: means ignore missing, categorical fill is the mode") {
    Dataset ds;
    ds.schema = testutil::tiny_schema();
    ds.records.push_back(testutil::tiny_record(2.0, 1.0, 0, 2000, true));
    ds.records.push_back(testutil::tiny_record(kMissing, 3.0, 0, 2000, true));
    ds.records.push_back(testutil::tiny_record(4.0, 5.0, 1, 2000, true));
    ds.records.push_back(testutil::tiny_record(6.0, 7.0, kMissing, 2000, true));
    auto imp = fit_imputer(ds);
    CHECK(imp.fill[0] == doctest::Approx(4.0).epsilon(1e-15));  // (2+4+6)/3
    CHECK(imp.fill[1] == doctest::Approx(4.0).epsilon(1e-15));  // all present
    CHECK(imp.fill[2] == 0.0);                                  // Vaginal x2 vs Cesarean x1
}

TEST_CASE("fit_imputer: categorical tie goes to the first schema category") {
    Dataset ds;
    ds.schema = testutil::tiny_schema();
    ds.records.push_back(testutil::tiny_record(1, 1, 1, 2000, true));
    ds.records.push_back(testutil::tiny_record(1, 1, 0, 2000, true));
    CHECK(fit_imputer(ds).fill[2] == 0.0);
}

TEST_CASE("fit_imputer: all-missing feature names the feature") {
    Dataset ds;
    ds.schema = testutil::tiny_schema();
    ds.records.push_back(testutil::tiny_record(kMissing, 1, 0, 2000, true));
    try {
        fit_imputer(ds);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find(kBirthWeightFeature) != std::string::npos);
    }
}

TEST_CASE("apply_imputer fills with train statistics, not test statistics") {
    // hand-computed 6-row fixture: train mean 3000, test mean 500
    Dataset train, test;
    train.schema = test.schema = testutil::tiny_schema();
    train.records.push_back(testutil::tiny_record(2000, 9, 0, 2000, true));
    train.records.push_back(testutil::tiny_record(3000, 9, 0, 2000, true));
    train.records.push_back(testutil::tiny_record(4000, 9, 0, 2000, true));
    test.records.push_back(testutil::tiny_record(400, 9, 0, 2002, true));
    test.records.push_back(testutil::tiny_record(600, 9, 0, 2002, true));
    test.records.push_back(testutil::tiny_record(kMissing, 9, 0, 2002, true));
    auto imp = fit_imputer(train);
    auto imputed = apply_imputer(test, imp);
    CHECK(imputed.records[2].values[0] == doctest::Approx(3000.0));
    // non-missing values unchanged
    CHECK(imputed.records[0].values[0] == 400.0);
}

TEST_CASE("apply_imputer is idempotent and rejects schema mismatch") {
    Dataset ds;
    ds.schema = testutil::tiny_schema();
    ds.records.push_back(testutil::tiny_record(2000, kMissing, kMissing, 2000, true));
    ds.records.push_back(testutil::tiny_record(3000, 7, 1, 2000, true));
    auto imp = fit_imputer(ds);
    auto once = apply_imputer(ds, imp);
    auto twice = apply_imputer(once, imp);
    for (std::size_t i = 0; i < once.records.size(); ++i)
        CHECK(once.records[i].values == twice.records[i].values);

    Imputer wrong;
    wrong.feature_count = 99;
    CHECK_THROWS(apply_imputer(ds, wrong));
}

TEST_CASE("encode: one-hot layout, labels, and column count") {
    Dataset ds;
    ds.schema = testutil::tiny_schema();
    ds.records.push_back(testutil::tiny_record(3300, 9, 0, 2000, true));
    ds.records.push_back(testutil::tiny_record(900, 2, 1, 2002, false, 3.5));
    auto [m, y] = encode(ds);
    // columns = 2 continuous + 2 one-hot
    REQUIRE(m.X.cols() == 4);
    CHECK(m.columns[0].source == kBirthWeightFeature);
    CHECK(m.columns[0].category == -1);
    CHECK(m.columns[2].category == 0);
    CHECK(m.columns[3].category == 1);
    CHECK(m.X(0, 2) == 1.0);
    CHECK(m.X(0, 3) == 0.0);
    CHECK(m.X(1, 3) == 1.0);
    // one-hot block sums to 1 per row
    for (Eigen::Index r = 0; r < m.X.rows(); ++r) CHECK(m.X(r, 2) + m.X(r, 3) == 1.0);
    CHECK(y(0) == 0.0);
    CHECK(y(1) == 1.0);  // died -> label 1
}

TEST_CASE("encode rejects residual missing values and is deterministic") {
    Dataset ds;
    ds.schema = testutil::tiny_schema();
    ds.records.push_back(testutil::tiny_record(kMissing, 9, 0, 2000, true));
    CHECK_THROWS(encode(ds));

    Dataset full;
    full.schema = testutil::tiny_schema();
    full.records.push_back(testutil::tiny_record(3300, 9, 0, 2000, true));
    full.records.push_back(testutil::tiny_record(2500, 7, 1, 2001, true));
    auto [m1, y1] = encode(full);
    auto [m2, y2] = encode(full);
    CHECK(testutil::bitwise_equal(m1.X, m2.X));
    CHECK(testutil::bitwise_equal(y1, y2));
}

TEST_CASE("select_features: subsets BW/AP/BWAP/ALL") {
    Dataset ds;
    ds.schema = testutil::tiny_schema();
    ds.records.push_back(testutil::tiny_record(3300, 9, 0, 2000, true));
    auto [m, y] = encode(ds);

    auto bw = select_features(m, FeatureSubset::Bw);
    REQUIRE(bw.X.cols() == 1);
    CHECK(bw.columns[0].source == kBirthWeightFeature);

    auto ap = select_features(m, FeatureSubset::Ap);
    REQUIRE(ap.X.cols() == 1);
    CHECK(ap.columns[0].source == kApgarFeature);

    auto bwap = select_features(m, FeatureSubset::BwAp);
    REQUIRE(bwap.X.cols() == 2);

    auto all = select_features(m, FeatureSubset::All);
    CHECK(testutil::bitwise_equal(all.X, m.X));
    CHECK(all.columns.size() == m.columns.size());
}

TEST_CASE("select_features: missing source feature is an error") {
    FeatureMatrix m;
    m.X = Eigen::MatrixXd::Zero(2, 1);
    m.columns = {{"something_else", -1}};
    CHECK_THROWS(select_features(m, FeatureSubset::Bw));
}

TEST_CASE("split_by_year partitions and counts drops") {
    Dataset ds;
    ds.schema = testutil::tiny_schema();
    ds.records.push_back(testutil::tiny_record(1, 1, 0, 1999, true));
    ds.records.push_back(testutil::tiny_record(2, 1, 0, 2000, true));
    ds.records.push_back(testutil::tiny_record(3, 1, 0, 2001, true));
    ds.records.push_back(testutil::tiny_record(4, 1, 0, 2002, true));
    ds.records.push_back(testutil::tiny_record(5, 1, 0, 2003, true));
    auto split = split_by_year(ds, {2000, 2001}, 2002);
    CHECK(split.train.records.size() == 2);
    CHECK(split.test.records.size() == 1);
    CHECK(split.dropped == 2);
    // conservation
    CHECK(split.train.records.size() + split.test.records.size() +
              static_cast<std::size_t>(split.dropped) ==
          ds.records.size());
    CHECK_THROWS(split_by_year(ds, {2002}, 2002));
}

TEST_CASE("subset names round trip") {
    for (auto s : {FeatureSubset::All, FeatureSubset::BwAp, FeatureSubset::Bw, FeatureSubset::Ap})
        CHECK(subset_from_string(to_string(s)) == s);
    CHECK_THROWS(subset_from_string("BOTH"));
}
