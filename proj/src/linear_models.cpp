#include "natal/linear_models.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace natal {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

Eigen::VectorXd LinearModel::score(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    if (X.cols() != weights.size())
        throw std::invalid_argument("LinearModel::score: column count mismatch");
    Eigen::VectorXd z = (X * weights).array() + intercept;
    if (penalty == Penalty::LogisticNone)
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i));
    return z;
}

LabelVector LinearModel::predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    Eigen::VectorXd s = score(X);
    LabelVector y(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) y(i) = s(i) >= threshold ? 1.0 : 0.0;
    return y;
}

Classifier LinearModel::as_classifier(std::string name) const {
    Classifier c;
    LinearModel copy = *this;
    c.score_fn = [copy](const Eigen::Ref<const Eigen::MatrixXd>& X) { return copy.score(X); };
    c.threshold = threshold;
    c.converged = converged;
    c.name = std::move(name);
    return c;
}

namespace {

const char* penalty_name(Penalty p) {
    switch (p) {
        case Penalty::LassoL1: return "lasso_l1";
        case Penalty::RidgeL2: return "ridge_l2";
        default: return "logistic";
    }
}

Penalty penalty_from_name(const std::string& s) {
    if (s == "lasso_l1") return Penalty::LassoL1;
    if (s == "ridge_l2") return Penalty::RidgeL2;
    if (s == "logistic") return Penalty::LogisticNone;
    throw std::runtime_error("unknown penalty tag: " + s);
}

struct Standardized {
    Eigen::MatrixXd Z;
    Eigen::VectorXd mean, sd;  // sd==0 marks constant columns (kept out of the fit)
};

Standardized standardize(const Eigen::Ref<const Eigen::MatrixXd>& X) {
    Standardized s;
    const double n = static_cast<double>(X.rows());
    s.mean = X.colwise().mean();
    s.sd.resize(X.cols());
    s.Z.resize(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        Eigen::VectorXd c = X.col(j).array() - s.mean(j);
        double var = c.squaredNorm() / n;
        s.sd(j) = var > 0.0 ? std::sqrt(var) : 0.0;
        s.Z.col(j) = s.sd(j) > 0.0 ? (c / s.sd(j)).eval() : Eigen::VectorXd::Zero(X.rows());
    }
    return s;
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace

LinearModel fit_lasso(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                      double alpha, double tol, int max_iter) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n == 0 || p == 0) throw std::invalid_argument("fit_lasso: empty input");
    auto s = standardize(X);
    const double ybar = y.mean();
    Eigen::VectorXd r = y.array() - ybar;  // residual with w = 0, b = ybar
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);

    // standardized columns have z'z/n = 1, so each coordinate update is a
    // plain soft threshold of the column-residual correlation
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        double max_delta = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (s.sd(j) == 0.0) continue;
            double rho = s.Z.col(j).dot(r) / static_cast<double>(n) + w(j);
            double wj = soft_threshold(rho, alpha);
            double delta = wj - w(j);
            if (delta != 0.0) {
                r -= delta * s.Z.col(j);
                w(j) = wj;
            }
            max_delta = std::max(max_delta, std::abs(delta));
        }
        if (max_delta < tol) {
            converged = true;
            break;
        }
    }

    LinearModel m;
    m.penalty = Penalty::LassoL1;
    m.alpha = alpha;
    m.converged = converged;
    m.weights.resize(p);
    double shift = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        m.weights(j) = s.sd(j) > 0.0 ? w(j) / s.sd(j) : 0.0;
        shift += m.weights(j) * s.mean(j);
    }
    m.intercept = ybar - shift;
    return m;
}

LinearModel fit_ridge(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                      double alpha) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n == 0 || p == 0) throw std::invalid_argument("fit_ridge: empty input");
    const double dn = static_cast<double>(n);
    Eigen::RowVectorXd xbar = X.colwise().mean();
    Eigen::MatrixXd Xc = X.rowwise() - xbar;
    const double ybar = y.mean();
    Eigen::VectorXd yc = y.array() - ybar;

    Eigen::MatrixXd A = Xc.transpose() * Xc / dn;
    A.diagonal().array() += alpha;
    Eigen::VectorXd b = Xc.transpose() * yc / dn;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("fit_ridge: normal equations not solvable");
    LinearModel m;
    m.penalty = Penalty::RidgeL2;
    m.alpha = alpha;
    m.weights = ldlt.solve(b);
    m.intercept = ybar - xbar.dot(m.weights);
    return m;
}

double logistic_loss(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                     const Eigen::VectorXd& w, double b, double l2) {
    Eigen::VectorXd z = (X * w).array() + b;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        // log(1 + e^z) - y z, computed without overflow
        double zi = z(i);
        double log1pe = zi > 0.0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
        loss += log1pe - y(i) * zi;
    }
    return loss / static_cast<double>(z.size()) + 0.5 * l2 * w.squaredNorm();
}

LinearModel fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                         double l2, double tol, int max_iter) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n == 0 || p == 0) throw std::invalid_argument("fit_logistic: empty input");
    auto s = standardize(X);
    const double dn = static_cast<double>(n);

    // weights on standardized columns; l2 penalizes the raw-scale norm, so
    // coordinate j carries penalty factor 1/sd_j^2
    Eigen::VectorXd pen(p);
    for (Eigen::Index j = 0; j < p; ++j) pen(j) = s.sd(j) > 0.0 ? 1.0 / (s.sd(j) * s.sd(j)) : 0.0;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    double b = 0.0;

    auto loss_at = [&](const Eigen::VectorXd& wv, double bv) {
        Eigen::VectorXd z = (s.Z * wv).array() + bv;
        double loss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double zi = z(i);
            double log1pe = zi > 0.0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
            loss += log1pe - y(i) * zi;
        }
        double penalty = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) penalty += pen(j) * wv(j) * wv(j);
        return loss / dn + 0.5 * l2 * penalty;
    };

    double loss = loss_at(w, b);
    bool converged = false;
    double step = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd z = (s.Z * w).array() + b;
        Eigen::VectorXd prob(n);
        for (Eigen::Index i = 0; i < n; ++i) prob(i) = sigmoid(z(i));
        Eigen::VectorXd gw = s.Z.transpose() * (prob - y) / dn + l2 * pen.cwiseProduct(w);
        double gb = (prob - y).sum() / dn;
        double gnorm = std::max(gw.cwiseAbs().maxCoeff(), std::abs(gb));
        if (gnorm < tol) {
            converged = true;
            break;
        }
        // backtracking line search on the descent direction
        step = std::min(step * 2.0, 1e4);
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            Eigen::VectorXd w2 = w - step * gw;
            double b2 = b - step * gb;
            double l2v = loss_at(w2, b2);
            if (l2v <= loss - 1e-4 * step * (gw.squaredNorm() + gb * gb)) {
                w = std::move(w2);
                b = b2;
                loss = l2v;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }

    LinearModel m;
    m.penalty = Penalty::LogisticNone;
    m.alpha = l2;
    m.converged = converged;
    m.weights.resize(p);
    double shift = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        m.weights(j) = s.sd(j) > 0.0 ? w(j) / s.sd(j) : 0.0;
        shift += m.weights(j) * s.mean(j);
    }
    m.intercept = b - shift;
    return m;
}

void LinearModel::save(std::ostream& os, const std::vector<ColumnInfo>& columns) const {
    os << "natal-linear-model v1\n";
    os << "penalty " << penalty_name(penalty) << '\n';
    os << "alpha " << alpha << '\n';
    os << "threshold " << threshold << '\n';
    os << "converged " << (converged ? 1 : 0) << '\n';
    os.precision(17);
    os << "intercept " << intercept << '\n';
    os << "weights " << weights.size() << '\n';
    for (Eigen::Index j = 0; j < weights.size(); ++j) {
        os << (static_cast<std::size_t>(j) < columns.size() ? columns[j].source : std::string("col"));
        if (static_cast<std::size_t>(j) < columns.size() && columns[j].category >= 0)
            os << '=' << columns[j].category;
        os << ' ' << weights(j) << '\n';
    }
}

LinearModel LoadLinearModelImpl(std::istream& is) {
    std::string magic, version;
    is >> magic >> version;
    if (magic != "natal-linear-model" || version != "v1")
        throw std::runtime_error("linear model file: unsupported format/version");
    LinearModel m;
    std::string key;
    Eigen::Index nw = 0;
    while (is >> key) {
        if (key == "penalty") {
            std::string v;
            is >> v;
            m.penalty = penalty_from_name(v);
        } else if (key == "alpha") {
            is >> m.alpha;
        } else if (key == "threshold") {
            is >> m.threshold;
        } else if (key == "converged") {
            int v;
            is >> v;
            m.converged = v != 0;
        } else if (key == "intercept") {
            is >> m.intercept;
        } else if (key == "weights") {
            is >> nw;
            m.weights.resize(nw);
            for (Eigen::Index j = 0; j < nw; ++j) {
                std::string name;
                is >> name >> m.weights(j);
            }
            break;
        } else {
            throw std::runtime_error("linear model file: unknown key " + key);
        }
    }
    return m;
}

LinearModel LinearModel::load(std::istream& is) { return LoadLinearModelImpl(is); }

}  // namespace natal
