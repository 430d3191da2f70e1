#include "natal/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace natal {

namespace {
const std::array<std::string, 4> kSubsetNames = {"ALL", "BWAP", "BW", "AP"};
}

const std::string& to_string(FeatureSubset s) { return kSubsetNames[static_cast<int>(s)]; }

FeatureSubset subset_from_string(const std::string& s) {
    for (int i = 0; i < 4; ++i)
        if (kSubsetNames[i] == s) return static_cast<FeatureSubset>(i);
    throw std::invalid_argument("unknown feature subset: " + s);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s, int line, const std::string& field) {
    double v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error("line " + std::to_string(line) + ": malformed numeric value '" + s +
                                 "' in column " + field);
    return v;
}

}  // namespace

Dataset parse_csv(const std::string& path, const FeatureSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file, header expected");
    auto header = split_line(line);

    // feature columns must match schema names; outcome columns located by name
    std::vector<int> feature_col(schema.size(), -1);
    int col_year = -1, col_survived = -1, col_age_h = -1, col_age_d = -1, col_cause = -1, col_race = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& h = header[c];
        if (h == "year") col_year = static_cast<int>(c);
        else if (h == "survived") col_survived = static_cast<int>(c);
        else if (h == "age_at_death_hours") col_age_h = static_cast<int>(c);
        else if (h == "age_at_death_days") col_age_d = static_cast<int>(c);
        else if (h == "cause") col_cause = static_cast<int>(c);
        else if (h == "race") col_race = static_cast<int>(c);
        else {
            int fi = schema.index_of(h);
            if (fi < 0) throw std::runtime_error(path + ": header column '" + h + "' not in schema");
            feature_col[fi] = static_cast<int>(c);
        }
    }
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (feature_col[i] < 0)
            throw std::runtime_error(path + ": schema feature '" + schema.at(i).name + "' missing from header");
    if (col_year < 0 || col_survived < 0 || col_race < 0)
        throw std::runtime_error(path + ": header must include year, survived and race columns");
    if (col_age_h < 0 && col_age_d < 0)
        throw std::runtime_error(path + ": header must include age_at_death_hours or age_at_death_days");

    Dataset ds;
    ds.schema = schema;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
        BirthRecord rec;
        rec.values.resize(schema.size(), kMissing);
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const std::string& cell = cells[feature_col[i]];
            if (cell.empty()) continue;
            const auto& spec = schema.at(i);
            if (spec.kind == FeatureKind::Continuous) {
                rec.values[i] = parse_number(cell, lineno, spec.name);
            } else {
                int idx = spec.category_index(cell);
                if (idx < 0)
                    throw std::runtime_error("line " + std::to_string(lineno) + ": unknown category '" + cell +
                                             "' for feature " + spec.name);
                rec.values[i] = idx;
            }
        }
        rec.year = static_cast<int>(parse_number(cells[col_year], lineno, "year"));
        rec.outcome.survived = parse_number(cells[col_survived], lineno, "survived") != 0.0;
        if (!rec.outcome.survived) {
            if (col_age_h >= 0 && !cells[col_age_h].empty())
                rec.outcome.age_at_death_hours = parse_number(cells[col_age_h], lineno, "age_at_death_hours");
            else if (col_age_d >= 0 && !cells[col_age_d].empty())
                rec.outcome.age_at_death_hours = 24.0 * parse_number(cells[col_age_d], lineno, "age_at_death_days");
            if (col_cause >= 0 && !cells[col_cause].empty()) {
                auto cause = cause_from_string(cells[col_cause]);
                if (!cause)
                    throw std::runtime_error("line " + std::to_string(lineno) + ": unknown cause '" +
                                             cells[col_cause] + "'");
                rec.outcome.cause = cause;
            }
        }
        auto race = race_from_string(cells[col_race]);
        if (!race)
            throw std::runtime_error("line " + std::to_string(lineno) + ": unknown race '" + cells[col_race] + "'");
        rec.outcome.race = *race;

        auto violations = validate(rec, schema);
        if (!violations.empty())
            throw std::runtime_error("line " + std::to_string(lineno) + ": invalid record: " +
                                     violations.front().field + ": " + violations.front().rule);
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

namespace {

void format_double(std::ostream& os, double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        os << static_cast<long long>(v);
    } else {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
        os.write(buf, p - buf);
    }
}

}  // namespace

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV file: " + path);
    for (std::size_t i = 0; i < ds.schema.size(); ++i) out << ds.schema.at(i).name << ',';
    out << "year,survived,age_at_death_hours,cause,race\n";
    for (const auto& rec : ds.records) {
        for (std::size_t i = 0; i < ds.schema.size(); ++i) {
            double v = rec.values[i];
            if (!is_missing(v)) {
                const auto& spec = ds.schema.at(i);
                if (spec.kind == FeatureKind::Categorical)
                    out << spec.categories[static_cast<int>(v)];
                else
                    format_double(out, v);
            }
            out << ',';
        }
        out << rec.year << ',' << (rec.outcome.survived ? 1 : 0) << ',';
        if (!rec.outcome.survived && !is_missing(rec.outcome.age_at_death_hours))
            format_double(out, rec.outcome.age_at_death_hours);
        out << ',';
        if (rec.outcome.cause) out << to_string(*rec.outcome.cause);
        out << ',' << to_string(rec.outcome.race) << '\n';
    }
}

Imputer fit_imputer(const Dataset& train) {
    const auto& schema = train.schema;
    Imputer imp;
    imp.feature_count = schema.size();
    imp.fill.resize(schema.size(), 0.0);
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& spec = schema.at(i);
        if (spec.kind == FeatureKind::Continuous) {
            double sum = 0.0;
            long n = 0;
            for (const auto& rec : train.records) {
                double v = rec.values[i];
                if (!is_missing(v)) {
                    sum += v;
                    ++n;
                }
            }
            if (n == 0)
                throw std::runtime_error("fit_imputer: feature '" + spec.name + "' has no observed values");
            imp.fill[i] = sum / static_cast<double>(n);
        } else {
            std::vector<long> counts(spec.categories.size(), 0);
            for (const auto& rec : train.records) {
                double v = rec.values[i];
                if (!is_missing(v)) ++counts[static_cast<int>(v)];
            }
            long total = 0;
            for (long c : counts) total += c;
            if (total == 0)
                throw std::runtime_error("fit_imputer: feature '" + spec.name + "' has no observed values");
            // tie -> first in schema category order
            int best = 0;
            for (std::size_t c = 1; c < counts.size(); ++c)
                if (counts[c] > counts[best]) best = static_cast<int>(c);
            imp.fill[i] = best;
        }
    }
    return imp;
}

Dataset apply_imputer(const Dataset& ds, const Imputer& imp) {
    if (imp.feature_count != ds.schema.size())
        throw std::runtime_error("apply_imputer: imputer fitted on a different schema");
    Dataset out = ds;
    for (auto& rec : out.records)
        for (std::size_t i = 0; i < rec.values.size(); ++i)
            if (is_missing(rec.values[i])) rec.values[i] = imp.fill[i];
    return out;
}

std::pair<FeatureMatrix, LabelVector> encode(const Dataset& ds) {
    const auto& schema = ds.schema;
    FeatureMatrix m;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& spec = schema.at(i);
        if (spec.kind == FeatureKind::Continuous) {
            m.columns.push_back({spec.name, -1});
        } else {
            for (std::size_t c = 0; c < spec.categories.size(); ++c)
                m.columns.push_back({spec.name, static_cast<int>(c)});
        }
    }
    const auto n = static_cast<Eigen::Index>(ds.records.size());
    m.X = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(m.columns.size()));
    LabelVector y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& rec = ds.records[r];
        Eigen::Index col = 0;
        for (std::size_t i = 0; i < schema.size(); ++i) {
            double v = rec.values[i];
            if (is_missing(v))
                throw std::runtime_error("encode: residual missing value in feature '" + schema.at(i).name +
                                         "' at row " + std::to_string(r));
            const auto& spec = schema.at(i);
            if (spec.kind == FeatureKind::Continuous) {
                m.X(r, col++) = v;
            } else {
                m.X(r, col + static_cast<Eigen::Index>(v)) = 1.0;
                col += static_cast<Eigen::Index>(spec.categories.size());
            }
        }
        y(r) = rec.outcome.survived ? 0.0 : 1.0;
    }
    return {std::move(m), std::move(y)};
}

FeatureMatrix select_features(const FeatureMatrix& m, FeatureSubset s) {
    if (s == FeatureSubset::All) return m;
    std::vector<std::string> wanted;
    if (s == FeatureSubset::Bw) wanted = {kBirthWeightFeature};
    else if (s == FeatureSubset::Ap) wanted = {kApgarFeature};
    else wanted = {kBirthWeightFeature, kApgarFeature};

    std::vector<Eigen::Index> keep;
    for (const auto& name : wanted) {
        bool found = false;
        for (std::size_t c = 0; c < m.columns.size(); ++c) {
            if (m.columns[c].source == name && m.columns[c].category < 0) {
                keep.push_back(static_cast<Eigen::Index>(c));
                found = true;
            }
        }
        if (!found)
            throw std::runtime_error("select_features: continuous feature '" + name + "' not present");
    }
    FeatureMatrix out;
    out.X.resize(m.X.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.X.col(static_cast<Eigen::Index>(i)) = m.X.col(keep[i]);
        out.columns.push_back(m.columns[keep[i]]);
    }
    return out;
}

YearSplit split_by_year(const Dataset& ds, const std::set<int>& train_years, int test_year) {
    if (train_years.count(test_year))
        throw std::invalid_argument("split_by_year: test year also listed as a train year");
    YearSplit out;
    out.train.schema = ds.schema;
    out.test.schema = ds.schema;
    for (const auto& rec : ds.records) {
        if (train_years.count(rec.year))
            out.train.records.push_back(rec);
        else if (rec.year == test_year)
            out.test.records.push_back(rec);
        else
            ++out.dropped;
    }
    if (out.train.records.empty()) throw std::runtime_error("split_by_year: empty train partition");
    if (out.test.records.empty()) throw std::runtime_error("split_by_year: empty test partition");
    return out;
}

}  // namespace natal
