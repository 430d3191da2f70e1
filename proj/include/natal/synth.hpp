#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "natal/ingest.hpp"

namespace natal {

struct ContinuousMarginal {
    double mean = 0.0;
    double sd = 1.0;
    double min = -1e300;
    double max = 1e300;
};

struct CategoricalMarginal {
    std::vector<double> probs;  // sums to 1, aligned with schema categories
};

// Ground-truth risk model: p* = sigmoid(w . x + b) on the encoded
// (pre-missingness) feature row. Weights live on the raw encoded scale.
struct GeneratorConfig {
    std::string name;
    FeatureSchema schema;
    std::vector<ContinuousMarginal> continuous;    // indexed by schema feature
    std::vector<CategoricalMarginal> categorical;  // indexed by schema feature
    Eigen::VectorXd risk_weights;                  // per encoded column
    double intercept = 0.0;
    double target_rate = 1.0 / 146.0;
    std::array<double, kNumMortalityClasses> mortality_class_probs = {0.30, 0.20, 0.25, 0.10, 0.15};
    Eigen::MatrixXd cause_weights;     // kNumCauses x encoded columns
    Eigen::VectorXd cause_intercepts;  // kNumCauses
    double cause_link_rate = 0.9;
    std::vector<double> missing_rate;  // per schema feature
    // survivors flip to a feature-independent Days28ToYear death at this rate
    double late_noise_rate = 0.0;
    // shared-latent loading coupling apgar to birth weight (positive
    // correlation: low birth weight goes with low apgar)
    double bw_apgar_coupling = 0.6;
    std::vector<int> years = {2000, 2001, 2002};
    std::vector<double> year_probs = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    // derived feature: birth weight category binned from grams, -1 if absent
    int bw_category_feature = -1;

    std::uint64_t hash() const;
    void validate() const;
};

struct SyntheticDataset {
    Dataset data;
    std::vector<double> p_star;  // true death probability per record
    std::uint64_t config_hash = 0;
};

// Bisection on the intercept until the Monte Carlo mean of sigmoid(w.x + b)
// over n_probe feature draws is within 2% relative of the target rate.
// Closed form logit(target) when all weights are zero.
double calibrate_intercept(const GeneratorConfig& config, long n_probe, std::uint64_t seed);

// Monte Carlo mean of sigmoid(w.x + intercept) over n_probe feature draws.
// Uses the same per-record feature streams as generate(), so with matching
// seed and n this equals the mean true probability of the generated sample.
double probe_rate(const GeneratorConfig& config, double intercept, long n_probe,
                  std::uint64_t seed);

SyntheticDataset generate(long n, const GeneratorConfig& config, std::uint64_t seed);

// AUC of the true-probability ranker; empirical ceiling for any model on
// this sample.
double bayes_auc(const SyntheticDataset& ds);

void write_oracle(const SyntheticDataset& ds, const std::string& path);
std::vector<double> read_oracle(const std::string& path);

struct SynthPreset {
    GeneratorConfig config;  // uncalibrated; call calibrate_intercept
    long default_n = 0;
};

// named, versioned benchmark presets
SynthPreset synth_preset(const std::string& name);
std::vector<std::string> synth_preset_names();

}  // namespace natal
