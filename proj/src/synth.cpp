#include "natal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "natal/linear_models.hpp"  // sigmoid
#include "natal/metrics.hpp"

namespace natal {

namespace {

constexpr std::array<double, kNumMortalityClasses + 1> kBinEdgesHours = {0.0, 1.0, 24.0, 168.0,
                                                                         672.0, kMaxDeathAgeHours};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

// per-record derived seeds: feature and outcome draws use independent
// streams, so calibration can replay exactly the features generation will use
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 2) + index;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double normal01(std::mt19937_64& rng) {
    // Box-Muller; one value per call keeps the stream layout simple
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

int draw_categorical(const std::vector<double>& probs, std::mt19937_64& rng) {
    double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (continuous.size() != schema.size() || categorical.size() != schema.size() ||
        missing_rate.size() != schema.size())
        throw std::invalid_argument("generator config: per-feature vectors must match schema size");
    if (!(target_rate > 0.0 && target_rate < 1.0))
        throw std::invalid_argument("generator config: target rate must lie in (0,1)");
    double s = 0.0;
    for (double p : mortality_class_probs) s += p;
    if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("generator config: mortality class probabilities must sum to 1");
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (schema.at(i).kind == FeatureKind::Categorical) {
            double t = 0.0;
            for (double p : categorical[i].probs) t += p;
            if (categorical[i].probs.size() != schema.at(i).categories.size() ||
                std::abs(t - 1.0) > 1e-12)
                throw std::invalid_argument("generator config: bad categorical marginal for " +
                                            schema.at(i).name);
        }
    }
    double ys = 0.0;
    for (double p : year_probs) ys += p;
    if (years.size() != year_probs.size() || std::abs(ys - 1.0) > 1e-12)
        throw std::invalid_argument("generator config: bad year distribution");
}

std::uint64_t GeneratorConfig::hash() const {
    std::ostringstream os;
    os.precision(17);
    os << name << '|';
    for (const auto& f : schema.features()) {
        os << f.name << ':' << static_cast<int>(f.kind) << ':' << f.allows_missing << ':';
        for (const auto& c : f.categories) os << c << ',';
        os << ';';
    }
    for (const auto& c : continuous) os << c.mean << ',' << c.sd << ',' << c.min << ',' << c.max << ';';
    for (const auto& c : categorical) {
        for (double p : c.probs) os << p << ',';
        os << ';';
    }
    for (Eigen::Index i = 0; i < risk_weights.size(); ++i) os << risk_weights(i) << ',';
    os << '|' << intercept << '|' << target_rate << '|';
    for (double p : mortality_class_probs) os << p << ',';
    os << '|';
    for (Eigen::Index i = 0; i < cause_weights.size(); ++i) os << cause_weights.data()[i] << ',';
    for (Eigen::Index i = 0; i < cause_intercepts.size(); ++i) os << cause_intercepts(i) << ',';
    os << '|' << cause_link_rate << '|' << late_noise_rate << '|' << bw_apgar_coupling << '|';
    for (double r : missing_rate) os << r << ',';
    for (std::size_t i = 0; i < years.size(); ++i) os << years[i] << ':' << year_probs[i] << ',';
    os << '|' << bw_category_feature;
    return fnv1a(os.str());
}

namespace {

// Draws one record's raw feature values (pre-missingness). Encoded row and
// values are produced together so p* uses exactly the emitted features.
struct DrawContext {
    const GeneratorConfig& cfg;
    int bw_idx, ap_idx;
    std::vector<Eigen::Index> col_offset;  // encoded column offset per feature
    Eigen::Index ncols;

    explicit DrawContext(const GeneratorConfig& c) : cfg(c) {
        bw_idx = c.schema.index_of(kBirthWeightFeature);
        ap_idx = c.schema.index_of(kApgarFeature);
        Eigen::Index off = 0;
        for (std::size_t i = 0; i < c.schema.size(); ++i) {
            col_offset.push_back(off);
            const auto& f = c.schema.at(i);
            off += f.kind == FeatureKind::Continuous
                       ? 1
                       : static_cast<Eigen::Index>(f.categories.size());
        }
        ncols = off;
    }

    void draw(std::mt19937_64& rng, std::vector<double>& values, Eigen::VectorXd& x) const {
        const auto& schema = cfg.schema;
        values.assign(schema.size(), 0.0);
        x.setZero(ncols);
        double latent = normal01(rng);
        double c = cfg.bw_apgar_coupling;
        double resid = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const auto& f = schema.at(i);
            if (static_cast<int>(i) == cfg.bw_category_feature) continue;  // derived below
            if (f.kind == FeatureKind::Continuous) {
                const auto& m = cfg.continuous[i];
                double z;
                if (static_cast<int>(i) == bw_idx || static_cast<int>(i) == ap_idx)
                    z = c * latent + resid * normal01(rng);
                else
                    z = normal01(rng);
                double v = std::clamp(m.mean + m.sd * z, m.min, m.max);
                values[i] = v;
                x(col_offset[i]) = v;
            } else {
                int k = draw_categorical(cfg.categorical[i].probs, rng);
                values[i] = k;
                x(col_offset[i] + k) = 1.0;
            }
        }
        if (cfg.bw_category_feature >= 0 && bw_idx >= 0) {
            // bins: very low < 1500 g, low < 2500 g, normal < 4000 g, high
            double g = values[static_cast<std::size_t>(bw_idx)];
            int k = g < 1500.0 ? 0 : g < 2500.0 ? 1 : g < 4000.0 ? 2 : 3;
            auto i = static_cast<std::size_t>(cfg.bw_category_feature);
            values[i] = k;
            x(col_offset[i] + k) = 1.0;
        }
    }
};

}  // namespace

double probe_rate(const GeneratorConfig& config, double intercept, long n_probe,
                  std::uint64_t seed) {
    DrawContext ctx(config);
    if (ctx.ncols != config.risk_weights.size())
        throw std::invalid_argument("probe_rate: risk weight length mismatch");
    double s = 0.0;
    std::vector<double> values;
    Eigen::VectorXd x;
    for (long i = 0; i < n_probe; ++i) {
        std::mt19937_64 rng(mix_seed(seed, 0, static_cast<std::uint64_t>(i)));
        ctx.draw(rng, values, x);
        s += sigmoid(config.risk_weights.dot(x) + intercept);
    }
    return s / static_cast<double>(n_probe);
}

double calibrate_intercept(const GeneratorConfig& config, long n_probe, std::uint64_t seed) {
    config.validate();
    double target = config.target_rate;
    if (config.risk_weights.isZero(0.0)) return std::log(target / (1.0 - target));

    DrawContext ctx(config);
    if (ctx.ncols != config.risk_weights.size())
        throw std::invalid_argument("calibrate_intercept: risk weight length mismatch");
    std::vector<double> dots(static_cast<std::size_t>(n_probe));
    std::vector<double> values;
    Eigen::VectorXd x;
    for (long i = 0; i < n_probe; ++i) {
        // same per-record feature streams generate() uses, so the calibrated
        // intercept transfers exactly when seed and n match
        std::mt19937_64 rng(mix_seed(seed, 0, static_cast<std::uint64_t>(i)));
        ctx.draw(rng, values, x);
        dots[static_cast<std::size_t>(i)] = config.risk_weights.dot(x);
    }
    auto rate_at = [&](double b) {
        double s = 0.0;
        for (double d : dots) s += sigmoid(d + b);
        return s / static_cast<double>(n_probe);
    };
    double lo = -60.0, hi = 60.0;
    if (rate_at(lo) > target || rate_at(hi) < target)
        throw std::runtime_error("calibrate_intercept: target rate unreachable in bracket");
    double best = 0.0, best_err = 1e300;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double r = rate_at(mid);
        double err = std::abs(r - target);
        if (err < best_err) {
            best_err = err;
            best = mid;
        }
        // converge well inside the 2% contract; extra iterations are cheap
        if (err <= 1e-3 * target) return mid;
        (r < target ? lo : hi) = mid;
    }
    if (best_err <= 0.02 * target) return best;
    throw std::runtime_error("calibrate_intercept: bisection failed to converge");
}

SyntheticDataset generate(long n, const GeneratorConfig& config, std::uint64_t seed) {
    config.validate();
    DrawContext ctx(config);
    if (ctx.ncols != config.risk_weights.size())
        throw std::invalid_argument("generate: risk weight length mismatch");
    bool has_causes = config.cause_weights.rows() == kNumCauses &&
                      config.cause_weights.cols() == ctx.ncols &&
                      config.cause_intercepts.size() == kNumCauses;

    int race_idx = config.schema.index_of("mother_race");

    SyntheticDataset out;
    out.data.schema = config.schema;
    out.data.records.reserve(static_cast<std::size_t>(n));
    out.p_star.reserve(static_cast<std::size_t>(n));
    out.config_hash = config.hash();

    std::vector<double> values;
    Eigen::VectorXd x;
    std::vector<double> mclass(config.mortality_class_probs.begin(), config.mortality_class_probs.end());

    for (long i = 0; i < n; ++i) {
        std::mt19937_64 feat_rng(mix_seed(seed, 0, static_cast<std::uint64_t>(i)));
        std::mt19937_64 rng(mix_seed(seed, 1, static_cast<std::uint64_t>(i)));
        ctx.draw(feat_rng, values, x);
        double p = sigmoid(config.risk_weights.dot(x) + config.intercept);
        out.p_star.push_back(p);

        BirthRecord rec;
        rec.values = values;

        bool dead = uniform01(rng) < p;
        int forced_class = -1;
        if (!dead && config.late_noise_rate > 0.0 && uniform01(rng) < config.late_noise_rate) {
            dead = true;
            forced_class = static_cast<int>(MortalityClass::Days28ToYear);
        }
        rec.outcome.survived = !dead;
        if (dead) {
            int mc = forced_class >= 0 ? forced_class : draw_categorical(mclass, rng);
            double lo = kBinEdgesHours[static_cast<std::size_t>(mc)];
            double hi = kBinEdgesHours[static_cast<std::size_t>(mc) + 1];
            rec.outcome.age_at_death_hours = lo + uniform01(rng) * (hi - lo);
            if (uniform01(rng) < config.cause_link_rate) {
                int cause;
                if (has_causes) {
                    Eigen::VectorXd logits = config.cause_weights * x + config.cause_intercepts;
                    double mx = logits.maxCoeff();
                    Eigen::VectorXd e = (logits.array() - mx).exp();
                    std::vector<double> probs(kNumCauses);
                    double tot = e.sum();
                    for (int k = 0; k < kNumCauses; ++k) probs[static_cast<std::size_t>(k)] = e(k) / tot;
                    cause = draw_categorical(probs, rng);
                } else {
                    cause = static_cast<int>(rng() % kNumCauses);
                }
                rec.outcome.cause = static_cast<CauseOfDeath>(cause);
            }
        }

        if (race_idx >= 0) {
            const auto& spec = config.schema.at(static_cast<std::size_t>(race_idx));
            auto r = race_from_string(spec.categories[static_cast<std::size_t>(
                values[static_cast<std::size_t>(race_idx)])]);
            rec.outcome.race = r.value_or(Race::Other);
        }

        rec.year = config.years[static_cast<std::size_t>(draw_categorical(config.year_probs, rng))];

        // missingness after label generation; the oracle p* is missingness-free
        for (std::size_t f = 0; f < config.schema.size(); ++f)
            if (config.schema.at(f).allows_missing && config.missing_rate[f] > 0.0 &&
                uniform01(rng) < config.missing_rate[f])
                rec.values[f] = kMissing;

        out.data.records.push_back(std::move(rec));
    }
    return out;
}

double bayes_auc(const SyntheticDataset& ds) {
    const auto n = static_cast<Eigen::Index>(ds.data.records.size());
    Eigen::VectorXd scores(n);
    LabelVector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        scores(i) = ds.p_star[static_cast<std::size_t>(i)];
        y(i) = ds.data.records[static_cast<std::size_t>(i)].outcome.survived ? 0.0 : 1.0;
    }
    return roc_auc(scores, y);
}

void write_oracle(const SyntheticDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write oracle file: " + path);
    out << "index,p_star\n";
    out.precision(17);
    for (std::size_t i = 0; i < ds.p_star.size(); ++i) out << i << ',' << ds.p_star[i] << '\n';
}

std::vector<double> read_oracle(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open oracle file: " + path);
    std::string line;
    std::getline(in, line);
    if (line != "index,p_star") throw std::runtime_error("oracle file: bad header");
    std::vector<double> out;
    while (std::getline(in, line)) {
        auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        out.push_back(std::stod(line.substr(comma + 1)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// presets

namespace {

struct SchemaBuilder {
    std::vector<FeatureSpec> specs;
    std::vector<ContinuousMarginal> cont;
    std::vector<CategoricalMarginal> cat;
    std::vector<double> missing;
    std::vector<double> zcoef;                 // per-feature z-scale coefficient (continuous)
    std::vector<std::vector<double>> catcoef;  // per-category coefficients

    void continuous_feature(const std::string& name, double mean, double sd, double lo, double hi,
                            double z_coefficient, double missing_rate) {
        specs.push_back({name, FeatureKind::Continuous, {}, missing_rate > 0.0});
        cont.push_back({mean, sd, lo, hi});
        cat.push_back({});
        missing.push_back(missing_rate);
        zcoef.push_back(z_coefficient);
        catcoef.push_back({});
    }

    void categorical_feature(const std::string& name, std::vector<std::string> categories,
                             std::vector<double> probs, std::vector<double> coefficients,
                             double missing_rate) {
        specs.push_back({name, FeatureKind::Categorical, std::move(categories), missing_rate > 0.0});
        cont.push_back({});
        cat.push_back({std::move(probs)});
        missing.push_back(missing_rate);
        zcoef.push_back(0.0);
        catcoef.push_back(std::move(coefficients));
    }

    GeneratorConfig build(const std::string& name) const {
        GeneratorConfig c;
        c.name = name;
        c.schema = FeatureSchema(specs);
        c.continuous = cont;
        c.categorical = cat;
        c.missing_rate = missing;
        Eigen::Index ncols = 0;
        for (const auto& f : specs)
            ncols += f.kind == FeatureKind::Continuous ? 1
                                                       : static_cast<Eigen::Index>(f.categories.size());
        c.risk_weights = Eigen::VectorXd::Zero(ncols);
        Eigen::Index off = 0;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (specs[i].kind == FeatureKind::Continuous) {
                // z-scale coefficient mapped to the raw encoded scale
                c.risk_weights(off) = cont[i].sd > 0.0 ? zcoef[i] / cont[i].sd : 0.0;
                ++off;
            } else {
                for (std::size_t k = 0; k < specs[i].categories.size(); ++k)
                    c.risk_weights(off + static_cast<Eigen::Index>(k)) =
                        k < catcoef[i].size() ? catcoef[i][k] : 0.0;
                off += static_cast<Eigen::Index>(specs[i].categories.size());
            }
        }
        return c;
    }
};

const std::vector<std::string> kRaceCategories = {
    "White",    "Black",       "AmericanIndian", "Chinese",    "Japanese",  "Hawaiian",
    "Filipino", "AsianKorean", "Samoan",         "Vietnamese", "Guamanian", "Other"};
const std::vector<double> kRaceProbs = {0.58, 0.21, 0.07, 0.03, 0.02, 0.02,
                                        0.02, 0.01, 0.01, 0.01, 0.01, 0.01};

void add_cause_model(GeneratorConfig& c) {
    const auto ncols = c.risk_weights.size();
    c.cause_weights = Eigen::MatrixXd::Zero(kNumCauses, ncols);
    c.cause_intercepts.resize(kNumCauses);
    c.cause_intercepts << 0.2, 0.6, 0.4, 0.0, 0.3, 0.5;
    int bw = c.schema.index_of(kBirthWeightFeature);
    if (bw >= 0) {
        Eigen::Index off = 0;
        for (int i = 0; i < bw; ++i)
            off += c.schema.at(static_cast<std::size_t>(i)).kind == FeatureKind::Continuous
                       ? 1
                       : static_cast<Eigen::Index>(
                             c.schema.at(static_cast<std::size_t>(i)).categories.size());
        // lighter infants skew toward gestation-related causes
        c.cause_weights(0, off) = -8e-4;
        c.cause_weights(3, off) = -4e-4;
    }
}

GeneratorConfig benchmark_config() {
    SchemaBuilder b;
    b.continuous_feature(kBirthWeightFeature, 3300.0, 550.0, 250.0, 6000.0, -2.0, 0.02);
    b.continuous_feature(kApgarFeature, 8.8, 1.1, 0.0, 10.0, -1.95, 0.03);
    b.continuous_feature("gestation_weeks", 38.7, 2.4, 20.0, 45.0, -2.4, 0.02);
    b.continuous_feature("mother_age", 27.0, 6.0, 12.0, 55.0, 0.225, 0.01);
    b.continuous_feature("father_age", 30.0, 7.0, 13.0, 70.0, 0.0, 0.10);
    b.continuous_feature("cigarettes_per_day", 1.3, 3.5, 0.0, 60.0, 0.525, 0.05);
    b.continuous_feature("prenatal_visits", 11.0, 3.8, 0.0, 30.0, -0.675, 0.04);
    b.continuous_feature("live_birth_order", 2.0, 1.2, 1.0, 12.0, 0.15, 0.02);
    b.continuous_feature("mother_weight_gain", 30.0, 12.0, 0.0, 90.0, -0.15, 0.06);
    b.categorical_feature("birth_weight_category", {"VeryLow", "Low", "Normal", "High"},
                          {0.01, 0.06, 0.83, 0.10}, {}, 0.0);
    b.categorical_feature("mother_race", kRaceCategories, kRaceProbs,
                          {0.0, 0.375, 0.3, -0.15, -0.15, 0.0, 0.0, -0.15, 0.0, 0.0, 0.0, 0.075}, 0.0);
    b.categorical_feature("sex", {"Male", "Female"}, {0.512, 0.488}, {0.12, 0.0}, 0.0);
    b.categorical_feature("plurality", {"Single", "Twin", "HigherOrder"}, {0.965, 0.032, 0.003},
                          {0.0, 0.75, 1.5}, 0.0);
    b.categorical_feature("heart_malformations", {"No", "Yes"}, {0.998, 0.002}, {0.0, 3.3}, 0.01);
    b.categorical_feature("assisted_ventilation_30min", {"No", "Yes"}, {0.985, 0.015}, {0.0, 2.1},
                          0.01);
    b.categorical_feature("other_congenital_anomalies", {"No", "Yes"}, {0.99, 0.01}, {0.0, 1.8},
                          0.01);
    b.categorical_feature("other_abnormal_conditions", {"No", "Yes"}, {0.97, 0.03}, {0.0, 1.2},
                          0.01);
    b.categorical_feature("mother_education", {"LessThanHS", "HighSchool", "SomeCollege", "College"},
                          {0.18, 0.32, 0.25, 0.25}, {0.375, 0.15, 0.0, -0.15}, 0.04);
    b.categorical_feature("mother_education_category", {"Low", "Mid", "High"}, {0.2, 0.45, 0.35},
                          {0.15, 0.0, -0.075}, 0.04);
    b.categorical_feature("marital_status", {"Married", "Unmarried"}, {0.67, 0.33}, {0.0, 0.225},
                          0.02);
    b.categorical_feature("state_of_occurrence", {"CA", "TX", "NY", "FL", "IL", "PA", "OH", "OtherState"},
                          {0.13, 0.09, 0.06, 0.05, 0.04, 0.04, 0.04, 0.55},
                          {0.0, 0.075, 0.0, 0.075, 0.0, 0.0, 0.075, 0.0}, 0.0);
    b.categorical_feature("mother_state_of_residence", {"CA", "TX", "NY", "FL", "OtherState"},
                          {0.13, 0.09, 0.06, 0.05, 0.67}, {0.0, 0.075, 0.0, 0.075, 0.0}, 0.02);
    b.categorical_feature("mother_place_of_birth", {"US", "Foreign"}, {0.78, 0.22}, {0.075, 0.0},
                          0.03);
    b.categorical_feature("delivery_method", {"Vaginal", "Cesarean"}, {0.73, 0.27}, {0.0, 0.3},
                          0.01);
    b.categorical_feature("labor_complications", {"No", "Yes"}, {0.85, 0.15}, {0.0, 0.6}, 0.02);

    GeneratorConfig c = b.build("benchmark");
    c.bw_category_feature = c.schema.index_of("birth_weight_category");
    add_cause_model(c);
    return c;
}

GeneratorConfig small_config(double bw_coefficient, double other_scale) {
    SchemaBuilder b;
    b.continuous_feature(kBirthWeightFeature, 3300.0, 550.0, 250.0, 6000.0, bw_coefficient, 0.0);
    b.continuous_feature(kApgarFeature, 8.8, 1.1, 0.0, 10.0, -1.0 * other_scale, 0.0);
    b.continuous_feature("gestation_weeks", 38.7, 2.4, 20.0, 45.0, -1.2 * other_scale, 0.0);
    b.continuous_feature("mother_age", 27.0, 6.0, 12.0, 55.0, 0.2 * other_scale, 0.0);
    b.continuous_feature("cigarettes_per_day", 1.3, 3.5, 0.0, 60.0, 0.3 * other_scale, 0.0);
    b.continuous_feature("prenatal_visits", 11.0, 3.8, 0.0, 30.0, -0.3 * other_scale, 0.0);
    b.continuous_feature("father_age", 30.0, 7.0, 13.0, 70.0, 0.0, 0.0);
    b.categorical_feature("mother_race", kRaceCategories, kRaceProbs,
                          {0.0, 0.2 * other_scale, 0.15 * other_scale, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                           0.0, 0.0, 0.0},
                          0.0);
    b.categorical_feature("marital_status", {"Married", "Unmarried"}, {0.67, 0.33}, {}, 0.0);
    b.categorical_feature("mother_education", {"LessThanHS", "HighSchool", "SomeCollege", "College"},
                          {0.18, 0.32, 0.25, 0.25},
                          {0.2 * other_scale, 0.1 * other_scale, 0.0, 0.0}, 0.0);
    GeneratorConfig c = b.build("small");
    add_cause_model(c);
    return c;
}

// ten features, eight with real signal; father_age and marital_status carry
// exactly zero weight so gain importance should bury them
GeneratorConfig importance_config() {
    SchemaBuilder b;
    b.continuous_feature(kBirthWeightFeature, 3300.0, 550.0, 250.0, 6000.0, -3.0, 0.0);
    b.continuous_feature(kApgarFeature, 8.8, 1.1, 0.0, 10.0, -1.5, 0.0);
    b.continuous_feature("gestation_weeks", 38.7, 2.4, 20.0, 45.0, -1.2, 0.0);
    b.continuous_feature("mother_age", 27.0, 6.0, 12.0, 55.0, 0.8, 0.0);
    b.continuous_feature("cigarettes_per_day", 8.0, 5.0, 0.0, 40.0, 0.7, 0.0);
    b.continuous_feature("prenatal_visits", 11.0, 3.8, 0.0, 30.0, -0.8, 0.0);
    b.continuous_feature("father_age", 30.0, 7.0, 13.0, 70.0, 0.0, 0.0);
    b.categorical_feature("mother_race", kRaceCategories, kRaceProbs,
                          {0.0, 1.0, 0.8, 0.4, 0.0, 0.3, 0.0, 0.3, 0.0, 0.0, 0.0, 0.4}, 0.0);
    b.categorical_feature("marital_status", {"Married", "Unmarried"}, {0.67, 0.33}, {}, 0.0);
    b.categorical_feature("mother_education", {"LessThanHS", "HighSchool", "SomeCollege", "College"},
                          {0.18, 0.32, 0.25, 0.25}, {0.9, 0.45, 0.0, -0.45}, 0.0);
    GeneratorConfig c = b.build("importance");
    add_cause_model(c);
    return c;
}

}  // namespace

std::vector<std::string> synth_preset_names() {
    return {"benchmark-small", "benchmark-tiny", "mc-strata", "mc-importance"};
}

SynthPreset synth_preset(const std::string& name) {
    SynthPreset p;
    if (name == "benchmark-small") {
        p.config = benchmark_config();
        p.config.name = "benchmark-small.v1";
        p.config.year_probs = {1.0 / 3, 1.0 / 3, 1.0 / 3};
        p.default_n = 300000;
    } else if (name == "benchmark-tiny") {
        p.config = benchmark_config();
        p.config.name = "benchmark-tiny.v1";
        p.default_n = 30000;
    } else if (name == "mc-strata") {
        p.config = small_config(-1.8, 1.0);
        p.config.name = "mc-strata.v1";
        p.config.target_rate = 0.03;
        p.config.late_noise_rate = 0.005;
        p.config.mortality_class_probs = {0.35, 0.25, 0.20, 0.12, 0.08};
        p.default_n = 12000;
    } else if (name == "mc-importance") {
        p.config = importance_config();
        p.config.name = "mc-importance.v1";
        p.config.target_rate = 0.05;
        p.default_n = 6000;
    } else {
        throw std::invalid_argument("unknown synth preset: " + name);
    }
    return p;
}

}  // namespace natal
