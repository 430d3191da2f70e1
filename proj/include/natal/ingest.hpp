#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "natal/domain.hpp"

namespace natal {

struct Dataset {
    FeatureSchema schema;
    std::vector<BirthRecord> records;
};

// Fill values learned from a training set: per-continuous-feature mean,
// per-categorical-feature most frequent category (tie broken by schema order).
struct Imputer {
    std::vector<double> fill;  // one per schema feature
    std::size_t feature_count = 0;
};

struct ColumnInfo {
    std::string source;  // schema feature name
    int category = -1;   // -1: raw continuous column; otherwise one-hot index
};

struct FeatureMatrix {
    Eigen::MatrixXd X;
    std::vector<ColumnInfo> columns;
};

using LabelVector = Eigen::VectorXd;  // entries in {0,1}; 1 = NotSurvival

enum class FeatureSubset { All, BwAp, Bw, Ap };

const std::string& to_string(FeatureSubset s);
FeatureSubset subset_from_string(const std::string& s);

// canonical feature names the BW/AP subsets select on
inline constexpr const char* kBirthWeightFeature = "birth_weight_grams";
inline constexpr const char* kApgarFeature = "apgar_score";

// CSV: UTF-8, comma separated, first row header. Feature columns by schema
// name plus outcome columns year, survived, age_at_death_hours (or
// age_at_death_days, converted x24), cause, race. Empty field = missing.
Dataset parse_csv(const std::string& path, const FeatureSchema& schema);
void write_csv(const Dataset& ds, const std::string& path);

Imputer fit_imputer(const Dataset& train);
Dataset apply_imputer(const Dataset& ds, const Imputer& imp);

std::pair<FeatureMatrix, LabelVector> encode(const Dataset& ds);

FeatureMatrix select_features(const FeatureMatrix& m, FeatureSubset s);

struct YearSplit {
    Dataset train;
    Dataset test;
    int dropped = 0;
};

YearSplit split_by_year(const Dataset& ds, const std::set<int>& train_years, int test_year);

}  // namespace natal
