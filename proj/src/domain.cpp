#include "natal/domain.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace natal {

int FeatureSpec::category_index(const std::string& label) const {
    auto it = std::find(categories.begin(), categories.end(), label);
    return it == categories.end() ? -1 : static_cast<int>(it - categories.begin());
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
    std::unordered_set<std::string> seen;
    for (const auto& f : features_) {
        if (f.name.empty()) throw std::invalid_argument("schema: empty feature name");
        if (!seen.insert(f.name).second)
            throw std::invalid_argument("schema: duplicate feature name '" + f.name + "'");
        if (f.kind == FeatureKind::Categorical && f.categories.size() < 2)
            throw std::invalid_argument("schema: categorical feature '" + f.name +
                                        "' needs >= 2 categories");
        if (f.kind == FeatureKind::Continuous && !f.categories.empty())
            throw std::invalid_argument("schema: continuous feature '" + f.name +
                                        "' must not list categories");
    }
}

int FeatureSchema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < features_.size(); ++i)
        if (features_[i].name == name) return static_cast<int>(i);
    return -1;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

// Schema files are line based:
//   feature <name> continuous [missing]
//   feature <name> categorical <cat1,cat2,...> [missing]
// '#' starts a comment.
FeatureSchema FeatureSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema file: " + path);
    std::vector<FeatureSpec> specs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        std::string kw, name, kind;
        is >> kw >> name >> kind;
        if (kw != "feature" || name.empty() || kind.empty())
            throw std::runtime_error("schema line " + std::to_string(lineno) + ": expected 'feature <name> <kind> ...'");
        FeatureSpec spec;
        spec.name = name;
        std::string rest;
        if (kind == "continuous") {
            spec.kind = FeatureKind::Continuous;
        } else if (kind == "categorical") {
            spec.kind = FeatureKind::Categorical;
            std::string cats;
            is >> cats;
            for (auto& c : split(cats, ',')) {
                c = trim(c);
                if (!c.empty()) spec.categories.push_back(c);
            }
        } else {
            throw std::runtime_error("schema line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
        }
        std::string flag;
        while (is >> flag) {
            if (flag == "missing")
                spec.allows_missing = true;
            else
                throw std::runtime_error("schema line " + std::to_string(lineno) + ": unknown flag '" + flag + "'");
        }
        specs.push_back(std::move(spec));
    }
    return FeatureSchema(std::move(specs));
}

void FeatureSchema::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write schema file: " + path);
    out << "# feature schema\n";
    for (const auto& f : features_) {
        out << "feature " << f.name << ' ';
        if (f.kind == FeatureKind::Continuous) {
            out << "continuous";
        } else {
            out << "categorical ";
            for (std::size_t i = 0; i < f.categories.size(); ++i) {
                if (i) out << ',';
                out << f.categories[i];
            }
        }
        if (f.allows_missing) out << " missing";
        out << '\n';
    }
}

namespace {
const std::array<std::string, kNumMortalityClasses> kMortalityNames = {
    "LessThanOneHour", "Hours1To23", "Days1To6", "Days7To27", "Days28ToYear"};
const std::array<std::string, kNumCauses> kCauseNames = {
    "GestationFetalMalnutrition", "SidsNecExternal", "CongenitalChromosomal",
    "MaternalFactors",            "DiseasesDisorders", "Other"};
const std::array<std::string, kNumRaces> kRaceNames = {
    "White",    "Black",  "AmericanIndian", "Chinese",    "Japanese",  "Hawaiian",
    "Filipino", "AsianKorean", "Samoan",    "Vietnamese", "Guamanian", "Other"};
}  // namespace

const std::string& to_string(MortalityClass c) { return kMortalityNames[static_cast<int>(c)]; }
const std::string& to_string(CauseOfDeath c) { return kCauseNames[static_cast<int>(c)]; }
const std::string& to_string(Race r) { return kRaceNames[static_cast<int>(r)]; }

std::optional<CauseOfDeath> cause_from_string(const std::string& s) {
    for (int i = 0; i < kNumCauses; ++i)
        if (kCauseNames[i] == s) return static_cast<CauseOfDeath>(i);
    return std::nullopt;
}

std::optional<Race> race_from_string(const std::string& s) {
    for (int i = 0; i < kNumRaces; ++i)
        if (kRaceNames[i] == s) return static_cast<Race>(i);
    return std::nullopt;
}

namespace {
// bin edges in hours, left-closed right-open
constexpr std::array<double, kNumMortalityClasses + 1> kBinEdges = {0.0, 1.0, 24.0, 168.0, 672.0, kMaxDeathAgeHours};
}

std::string mortality_class_interval(MortalityClass c) {
    int i = static_cast<int>(c);
    std::ostringstream os;
    os << '[' << kBinEdges[i] << "h, " << kBinEdges[i + 1] << "h)";
    return os.str();
}

MortalityClass mortality_class(double age_at_death_hours) {
    if (!(age_at_death_hours >= 0.0) || age_at_death_hours >= kMaxDeathAgeHours)
        throw std::out_of_range("age at death out of [0, 8784) hours: " + std::to_string(age_at_death_hours));
    for (int i = kNumMortalityClasses - 1; i > 0; --i)
        if (age_at_death_hours >= kBinEdges[i]) return static_cast<MortalityClass>(i);
    return MortalityClass::LessThanOneHour;
}

std::vector<Violation> validate(const BirthRecord& record, const FeatureSchema& schema) {
    std::vector<Violation> out;
    if (record.values.size() != schema.size()) {
        out.push_back({"values", "value count " + std::to_string(record.values.size()) +
                                     " does not match schema feature count " + std::to_string(schema.size())});
        return out;
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& spec = schema.at(i);
        double v = record.values[i];
        if (is_missing(v)) {
            if (!spec.allows_missing)
                out.push_back({spec.name, "missing value but feature does not allow missing"});
            continue;
        }
        if (spec.kind == FeatureKind::Categorical) {
            double r = std::round(v);
            if (r != v || r < 0 || r >= static_cast<double>(spec.categories.size()))
                out.push_back({spec.name, "categorical value index out of range"});
        } else if (!std::isfinite(v)) {
            out.push_back({spec.name, "non-finite continuous value"});
        }
    }
    const Outcome& o = record.outcome;
    if (o.survived) {
        if (!is_missing(o.age_at_death_hours))
            out.push_back({"outcome", "outcome consistency: survived record carries age at death"});
        if (o.cause.has_value())
            out.push_back({"outcome", "outcome consistency: survived record carries cause of death"});
    } else {
        if (is_missing(o.age_at_death_hours)) {
            out.push_back({"outcome", "death record missing age at death"});
        } else if (!(o.age_at_death_hours >= 0.0) || o.age_at_death_hours >= kMaxDeathAgeHours) {
            out.push_back({"outcome", "age at death outside [0, 8784) hours"});
        }
    }
    return out;
}

}  // namespace natal
