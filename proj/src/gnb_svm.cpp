#include "natal/gnb_svm.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace natal {

GnbModel fit_gnb(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y, double eps) {
    const Eigen::Index n = X.rows(), p = X.cols();
    long count[2] = {0, 0};
    for (Eigen::Index i = 0; i < n; ++i) ++count[y(i) != 0.0 ? 1 : 0];
    if (count[0] == 0 || count[1] == 0)
        throw std::runtime_error("fit_gnb: both classes must be present");

    GnbModel m;
    m.mean = Eigen::MatrixXd::Zero(2, p);
    m.variance = Eigen::MatrixXd::Zero(2, p);
    for (Eigen::Index i = 0; i < n; ++i) m.mean.row(y(i) != 0.0 ? 1 : 0) += X.row(i);
    for (int c = 0; c < 2; ++c) m.mean.row(c) /= static_cast<double>(count[c]);
    for (Eigen::Index i = 0; i < n; ++i) {
        int c = y(i) != 0.0 ? 1 : 0;
        m.variance.row(c) += (X.row(i) - m.mean.row(c)).array().square().matrix();
    }
    for (int c = 0; c < 2; ++c) m.variance.row(c) /= static_cast<double>(count[c]);

    if (eps < 0.0) {
        double vmax = m.variance.maxCoeff();
        eps = vmax > 0.0 ? 1e-9 * vmax : 1e-9;
    }
    m.eps = eps;
    m.variance = m.variance.cwiseMax(eps);
    for (int c = 0; c < 2; ++c)
        m.log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(n));
    return m;
}

Eigen::VectorXd GnbModel::score(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    if (X.cols() != mean.cols())
        throw std::invalid_argument("GnbModel::score: column count mismatch");
    const Eigen::Index n = X.rows(), p = X.cols();
    Eigen::Matrix2Xd half_log_var(2, p);
    for (int c = 0; c < 2; ++c)
        for (Eigen::Index j = 0; j < p; ++j) half_log_var(c, j) = 0.5 * std::log(variance(c, j));
    Eigen::VectorXd out(n);
    const double log_sqrt_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    for (Eigen::Index i = 0; i < n; ++i) {
        double log_joint[2];
        for (int c = 0; c < 2; ++c) {
            double s = log_prior[c];
            for (Eigen::Index j = 0; j < p; ++j) {
                double d = X(i, j) - mean(c, j);
                s += -log_sqrt_2pi - half_log_var(c, j) - 0.5 * d * d / variance(c, j);
            }
            log_joint[c] = s;
        }
        double mx = std::max(log_joint[0], log_joint[1]);
        double e0 = std::exp(log_joint[0] - mx), e1 = std::exp(log_joint[1] - mx);
        out(i) = e1 / (e0 + e1);
    }
    return out;
}

Classifier GnbModel::as_classifier(std::string name) const {
    Classifier c;
    GnbModel copy = *this;
    c.score_fn = [copy](const Eigen::Ref<const Eigen::MatrixXd>& X) { return copy.score(X); };
    c.threshold = threshold;
    c.name = std::move(name);
    return c;
}

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& z, double gamma) {
    if (x.size() != z.size()) throw std::invalid_argument("rbf_kernel: dimension mismatch");
    if (!(gamma > 0.0)) throw std::invalid_argument("rbf_kernel: gamma must be positive");
    return std::exp(-gamma * (x - z).squaredNorm());
}

OcsvmModel fit_ocsvm(const Eigen::Ref<const Eigen::MatrixXd>& X_majority, double gamma, double nu,
                     double tol, long max_iter) {
    const Eigen::Index n = X_majority.rows();
    if (n < 2) throw std::invalid_argument("fit_ocsvm: need at least 2 rows");
    if (!(gamma > 0.0)) throw std::invalid_argument("fit_ocsvm: gamma must be positive");
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("fit_ocsvm: nu must lie in (0,1]");

    const double C = 1.0 / (nu * static_cast<double>(n));

    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double k = std::exp(-gamma * (X_majority.row(i) - X_majority.row(j)).squaredNorm());
            K(i, j) = k;
            K(j, i) = k;
        }
    }

    // uniform start; always feasible since 1/n <= 1/(nu*n)
    Eigen::VectorXd a = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));

    Eigen::VectorXd g = K * a;  // gradient of 1/2 a'Ka

    bool converged = false;
    for (long it = 0; it < max_iter; ++it) {
        // most violating pair: raise the coordinate with the smallest
        // gradient (if below its box), lower the one with the largest
        Eigen::Index up = -1, down = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (a(i) < C - 1e-15 && (up < 0 || g(i) < g(up))) up = i;
            if (a(i) > 1e-15 && (down < 0 || g(i) > g(down))) down = i;
        }
        if (up < 0 || down < 0 || g(down) - g(up) < tol) {
            converged = true;
            break;
        }
        double denom = K(up, up) + K(down, down) - 2.0 * K(up, down);
        double delta;
        if (denom <= 1e-15) {
            delta = std::min(C - a(up), a(down));  // linear along the segment; go to a bound
        } else {
            delta = std::min({(g(down) - g(up)) / denom, C - a(up), a(down)});
        }
        if (delta <= 0.0) break;
        a(up) += delta;
        a(down) -= delta;
        g += delta * (K.col(up) - K.col(down));
    }

    OcsvmModel m;
    m.support = X_majority;
    m.alpha = a;
    m.gamma = gamma;
    m.nu = nu;
    m.converged = converged;

    // rho from margin support vectors (0 < a_i < C); fall back to the middle
    // of the KKT band when every coefficient sits on a bound
    double rho_sum = 0.0;
    long rho_n = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (a(i) > 1e-12 && a(i) < C - 1e-12) {
            rho_sum += g(i);
            ++rho_n;
        }
    if (rho_n > 0) {
        m.rho = rho_sum / static_cast<double>(rho_n);
    } else {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (a(i) >= C - 1e-12) hi = std::max(hi, g(i));  // bound SVs: f <= 0
            if (a(i) <= 1e-12) lo = std::min(lo, g(i));      // interior points: f >= 0
        }
        if (!std::isfinite(lo)) lo = hi;
        if (!std::isfinite(hi)) hi = lo;
        m.rho = 0.5 * (lo + hi);
    }
    return m;
}

double ocsvm_dual_objective(const OcsvmModel& m) {
    const Eigen::Index n = m.support.rows();
    double obj = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (m.alpha(i) == 0.0) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (m.alpha(j) == 0.0) continue;
            double k = std::exp(-m.gamma * (m.support.row(i) - m.support.row(j)).squaredNorm());
            obj += m.alpha(i) * m.alpha(j) * k;
        }
    }
    return 0.5 * obj;
}

Eigen::VectorXd OcsvmModel::decision(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    if (X.cols() != support.cols())
        throw std::invalid_argument("OcsvmModel::decision: column count mismatch");
    Eigen::VectorXd f(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < support.rows(); ++i) {
            if (alpha(i) == 0.0) continue;
            s += alpha(i) * std::exp(-gamma * (support.row(i) - X.row(r)).squaredNorm());
        }
        f(r) = s - rho;
    }
    return f;
}

Eigen::VectorXd OcsvmModel::score(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    return -decision(X);
}

Classifier OcsvmModel::as_classifier(std::string name) const {
    Classifier c;
    auto copy = std::make_shared<OcsvmModel>(*this);
    c.score_fn = [copy](const Eigen::Ref<const Eigen::MatrixXd>& X) { return copy->score(X); };
    c.threshold = 0.0;  // label 1 iff f(x) < 0, i.e. risk -f(x) >= 0
    c.converged = converged;
    c.name = std::move(name);
    return c;
}

void OcsvmModel::save(std::ostream& os) const {
    os << "natal-ocsvm-model v1\n";
    os.precision(17);
    os << "gamma " << gamma << "\nnu " << nu << "\nrho " << rho << "\nconverged " << (converged ? 1 : 0)
       << '\n';
    os << "support " << support.rows() << ' ' << support.cols() << '\n';
    for (Eigen::Index i = 0; i < support.rows(); ++i) {
        os << alpha(i);
        for (Eigen::Index j = 0; j < support.cols(); ++j) os << ' ' << support(i, j);
        os << '\n';
    }
}

OcsvmModel OcsvmModel::load(std::istream& is) {
    std::string magic, version;
    is >> magic >> version;
    if (magic != "natal-ocsvm-model" || version != "v1")
        throw std::runtime_error("ocsvm model file: unsupported format/version");
    OcsvmModel m;
    std::string key;
    Eigen::Index rows = 0, cols = 0;
    while (is >> key) {
        if (key == "gamma") is >> m.gamma;
        else if (key == "nu") is >> m.nu;
        else if (key == "rho") is >> m.rho;
        else if (key == "converged") {
            int v;
            is >> v;
            m.converged = v != 0;
        } else if (key == "support") {
            is >> rows >> cols;
            m.support.resize(rows, cols);
            m.alpha.resize(rows);
            for (Eigen::Index i = 0; i < rows; ++i) {
                is >> m.alpha(i);
                for (Eigen::Index j = 0; j < cols; ++j) is >> m.support(i, j);
            }
            break;
        } else {
            throw std::runtime_error("ocsvm model file: unknown key " + key);
        }
    }
    return m;
}

}  // namespace natal
