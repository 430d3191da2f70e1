#pragma once

// Shared fixtures and independent oracles for the test suite. Everything in
// here is deliberately naive (brute force, closed form, or textbook series)
// so it cannot share bugs with the library implementations.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "natal/domain.hpp"
#include "natal/ingest.hpp"

namespace testutil {

// ---------------------------------------------------------------------------
// metrics oracles

// O(n^2) pair counting with half credit for ties
inline double brute_force_auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& y) {
    double num = 0.0;
    long pairs = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) == 0.0) continue;
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            if (y(j) != 0.0) continue;
            ++pairs;
            if (scores(i) > scores(j)) num += 1.0;
            else if (scores(i) == scores(j)) num += 0.5;
        }
    }
    if (pairs == 0) throw std::runtime_error("brute_force_auc: need both classes");
    return num / static_cast<double>(pairs);
}

// ---------------------------------------------------------------------------
// statistical test oracles (normal CDF, KS, chi-square quantile)

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// CDF of a normal clamped into [lo, hi] (clamping puts atoms at the bounds):
// P(X <= v) = Phi((v - mean)/sd) for lo <= v < hi, 1 at v >= hi.
inline double clamped_normal_cdf(double v, double mean, double sd, double lo, double hi) {
    if (v < lo) return 0.0;
    if (v >= hi) return 1.0;
    return normal_cdf((v - mean) / sd);
}

// left limit of the same CDF (differs only at the atoms)
inline double clamped_normal_cdf_left(double v, double mean, double sd, double lo, double hi) {
    if (v <= lo) return 0.0;
    if (v > hi) return 1.0;
    return normal_cdf((v - mean) / sd);
}

// two-sided KS statistic of a sample against the clamped normal
inline double ks_statistic(std::vector<double> sample, double mean, double sd, double lo,
                           double hi) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = clamped_normal_cdf(sample[i], mean, sd, lo, hi);
        double fl = clamped_normal_cdf_left(sample[i], mean, sd, lo, hi);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, fl - static_cast<double>(i) / n);
    }
    return d;
}

// asymptotic critical value; conservative in the presence of atoms
inline double ks_critical(double alpha, std::size_t n) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

// regularized lower incomplete gamma P(a, x), series + continued fraction
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Lentz continued fraction for Q(a, x)
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi2_cdf(double x, int dof) { return gamma_p(0.5 * dof, 0.5 * x); }

// quantile by bisection; plenty accurate for test thresholds
inline double chi2_quantile(double p, int dof) {
    double lo = 0.0, hi = 1.0;
    while (chi2_cdf(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (chi2_cdf(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Pearson chi-square statistic against expected probabilities
inline double chi2_statistic(const std::vector<long>& counts, const std::vector<double>& probs) {
    long n = 0;
    for (long c : counts) n += c;
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double e = probs[i] * static_cast<double>(n);
        if (e <= 0.0) continue;
        double d = static_cast<double>(counts[i]) - e;
        stat += d * d / e;
    }
    return stat;
}

// ---------------------------------------------------------------------------
// quadratic programming oracle

// Exhaustive minimization of 0.5 a' K a over the feasible simplex
// { a : sum a = 1, 0 <= a_i <= C } at grid resolution M (a_i = units_i / M).
// For a convex quadratic the grid optimum is within 0.5 * lambda_max * n / M^2
// of the true optimum: rounding the true minimizer onto the grid keeps the
// simplex sum exact and respects active bounds, so the first-order term is
// non-positive by the KKT conditions.
inline double simplex_grid_min(const Eigen::MatrixXd& K, double C, int M) {
    const int n = static_cast<int>(K.rows());
    const int cap = static_cast<int>(std::floor(C * M + 1e-9));
    std::vector<int> units(static_cast<std::size_t>(n), 0);
    double best = 1e300;
    std::function<void(int, int)> rec = [&](int idx, int left) {
        if (idx == n - 1) {
            if (left > cap) return;
            units[static_cast<std::size_t>(idx)] = left;
            Eigen::VectorXd a(n);
            for (int i = 0; i < n; ++i) a(i) = static_cast<double>(units[static_cast<std::size_t>(i)]) / M;
            double o = 0.5 * a.dot(K * a);
            if (o < best) best = o;
            return;
        }
        int lo = std::max(0, left - (n - 1 - idx) * cap);
        for (int u = lo; u <= std::min(left, cap); ++u) {
            units[static_cast<std::size_t>(idx)] = u;
            rec(idx + 1, left - u);
        }
    };
    rec(0, M);
    return best;
}

// ---------------------------------------------------------------------------
// misc

inline bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

// ---------------------------------------------------------------------------
// small shared fixtures

inline natal::FeatureSchema tiny_schema() {
    std::vector<natal::FeatureSpec> specs;
    specs.push_back({natal::kBirthWeightFeature, natal::FeatureKind::Continuous, {}, true});
    specs.push_back({natal::kApgarFeature, natal::FeatureKind::Continuous, {}, true});
    specs.push_back(
        {"delivery", natal::FeatureKind::Categorical, {"Vaginal", "Cesarean"}, true});
    return natal::FeatureSchema(specs);
}

inline natal::BirthRecord tiny_record(double bw, double apgar, double delivery, int year,
                                      bool survived, double age_hours = natal::kMissing,
                                      std::optional<natal::CauseOfDeath> cause = std::nullopt,
                                      natal::Race race = natal::Race::White) {
    natal::BirthRecord r;
    r.values = {bw, apgar, delivery};
    r.year = year;
    r.outcome.survived = survived;
    r.outcome.age_at_death_hours = age_hours;
    r.outcome.cause = cause;
    r.outcome.race = race;
    return r;
}

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

}  // namespace testutil
