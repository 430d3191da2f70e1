#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace natal {

// Missing values are carried as NaN, both for continuous features and for
// categorical features (which otherwise store the category index as a double).
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Death within the first year; 366 days so leap years are covered.
inline constexpr double kMaxDeathAgeHours = 8784.0;

enum class FeatureKind { Continuous, Categorical };

struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::Continuous;
    std::vector<std::string> categories;  // empty for continuous
    bool allows_missing = false;

    int category_index(const std::string& label) const;
};

class FeatureSchema {
public:
    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<FeatureSpec> features);

    const std::vector<FeatureSpec>& features() const { return features_; }
    std::size_t size() const { return features_.size(); }
    const FeatureSpec& at(std::size_t i) const { return features_[i]; }
    // -1 when absent
    int index_of(const std::string& name) const;

    static FeatureSchema load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::vector<FeatureSpec> features_;
};

enum class MortalityClass { LessThanOneHour, Hours1To23, Days1To6, Days7To27, Days28ToYear };
inline constexpr int kNumMortalityClasses = 5;

enum class CauseOfDeath {
    GestationFetalMalnutrition,
    SidsNecExternal,
    CongenitalChromosomal,
    MaternalFactors,
    DiseasesDisorders,
    Other
};
inline constexpr int kNumCauses = 6;

enum class Race {
    White,
    Black,
    AmericanIndian,
    Chinese,
    Japanese,
    Hawaiian,
    Filipino,
    AsianKorean,
    Samoan,
    Vietnamese,
    Guamanian,
    Other
};
inline constexpr int kNumRaces = 12;

const std::string& to_string(MortalityClass c);
const std::string& to_string(CauseOfDeath c);
const std::string& to_string(Race r);
std::optional<CauseOfDeath> cause_from_string(const std::string& s);
std::optional<Race> race_from_string(const std::string& s);

// Human-readable bin label, e.g. "[0h, 1h)".
std::string mortality_class_interval(MortalityClass c);

struct Outcome {
    bool survived = true;
    // present iff !survived
    double age_at_death_hours = kMissing;
    // present iff !survived and the death record is linked
    std::optional<CauseOfDeath> cause;
    // mother's race, carried on every record
    Race race = Race::Other;
};

struct BirthRecord {
    // aligned 1:1 with the schema's feature list; categorical values hold the
    // category index, missing values hold NaN
    std::vector<double> values;
    int year = 0;
    Outcome outcome;
};

// Maps an age at death to its timing bin. Bins are left-closed right-open and
// partition [0, 8784h). Throws std::out_of_range outside that interval.
MortalityClass mortality_class(double age_at_death_hours);

struct Violation {
    std::string field;
    std::string rule;
};

// Checks a record against the schema and the outcome consistency rules.
// Violations are data, not failures; an empty list means the record is valid.
std::vector<Violation> validate(const BirthRecord& record, const FeatureSchema& schema);

}  // namespace natal
