#include "natal/mlp.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "natal/linear_models.hpp"  // sigmoid

namespace natal {

namespace {

struct ForwardPass {
    std::array<Eigen::MatrixXd, 3> hidden;  // post-relu activations, rows = batch
    Eigen::VectorXd logits;
};

Eigen::MatrixXd standardize_input(const MlpModel& m, const Eigen::Ref<const Eigen::MatrixXd>& X) {
    if (X.cols() != m.input_mean.size())
        throw std::invalid_argument("mlp: input width mismatch");
    return (X.rowwise() - m.input_mean.transpose()).array().rowwise() /
           m.input_scale.transpose().array();
}

ForwardPass run_forward(const MlpModel& m, const Eigen::MatrixXd& Z) {
    ForwardPass fp;
    Eigen::MatrixXd a = Z;
    for (int l = 0; l < 3; ++l) {
        fp.hidden[l] = ((a * m.W[l]).rowwise() + m.b[l].transpose()).cwiseMax(0.0);
        a = fp.hidden[l];
    }
    fp.logits = (a * m.W[3]).col(0).array() + m.b[3](0);
    return fp;
}

double stable_bce(const Eigen::VectorXd& logits, const LabelVector& y) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        double z = logits(i);
        double log1pe = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += log1pe - y(i) * z;
    }
    return loss / static_cast<double>(logits.size());
}

}  // namespace

Eigen::VectorXd mlp_forward(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X) {
    ForwardPass fp = run_forward(model, standardize_input(model, X));
    Eigen::VectorXd out(fp.logits.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = sigmoid(fp.logits(i));
    return out;
}

Eigen::VectorXd MlpModel::score(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    return mlp_forward(*this, X);
}

double mlp_loss(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                const LabelVector& y) {
    ForwardPass fp = run_forward(model, standardize_input(model, X));
    return stable_bce(fp.logits, y);
}

MlpGradients mlp_backward(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& Xbatch,
                          const LabelVector& ybatch) {
    if (Xbatch.rows() == 0) throw std::invalid_argument("mlp_backward: empty batch");
    const double B = static_cast<double>(Xbatch.rows());
    Eigen::MatrixXd Z = standardize_input(model, Xbatch);
    ForwardPass fp = run_forward(model, Z);

    MlpGradients g;
    // fused output gradient (p - y)/B on the logit
    Eigen::VectorXd delta_out(fp.logits.size());
    for (Eigen::Index i = 0; i < delta_out.size(); ++i)
        delta_out(i) = (sigmoid(fp.logits(i)) - ybatch(i)) / B;

    g.W[3] = fp.hidden[2].transpose() * delta_out;
    g.b[3] = Eigen::VectorXd::Constant(1, delta_out.sum());

    Eigen::MatrixXd delta = delta_out * model.W[3].transpose();  // batch x h3
    for (int l = 2; l >= 0; --l) {
        delta = delta.cwiseProduct((fp.hidden[l].array() > 0.0).cast<double>().matrix());
        const Eigen::MatrixXd& below = l == 0 ? Z : fp.hidden[l - 1];
        g.W[l] = below.transpose() * delta;
        g.b[l] = delta.colwise().sum();
        if (l > 0) delta = delta * model.W[l].transpose();
    }
    return g;
}

MlpModel fit_mlp(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                 const MlpParams& params) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n == 0 || p == 0) throw std::invalid_argument("fit_mlp: empty input");

    MlpModel m;
    m.input_mean = X.colwise().mean();
    m.input_scale.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double var = (X.col(j).array() - m.input_mean(j)).square().sum() / static_cast<double>(n);
        m.input_scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
    }

    std::array<int, 5> widths = {static_cast<int>(p), params.hidden[0], params.hidden[1],
                                 params.hidden[2], 1};
    std::mt19937_64 rng(params.seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
    for (int l = 0; l < 4; ++l) {
        m.W[l].resize(widths[l], widths[l + 1]);
        for (Eigen::Index i = 0; i < m.W[l].size(); ++i)
            m.W[l].data()[i] = params.init_scale * (2.0 * uniform() - 1.0);
        m.b[l] = Eigen::VectorXd::Zero(widths[l + 1]);
    }

    // Adam state
    MlpGradients mom, vel;
    for (int l = 0; l < 4; ++l) {
        mom.W[l] = Eigen::MatrixXd::Zero(widths[l], widths[l + 1]);
        vel.W[l] = Eigen::MatrixXd::Zero(widths[l], widths[l + 1]);
        mom.b[l] = Eigen::VectorXd::Zero(widths[l + 1]);
        vel.b[l] = Eigen::VectorXd::Zero(widths[l + 1]);
    }
    long t = 0;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    auto adam_step = [&](Eigen::Map<Eigen::ArrayXd> w, Eigen::Map<Eigen::ArrayXd> gm,
                         Eigen::Map<Eigen::ArrayXd> gv, const Eigen::ArrayXd& grad) {
        gm = params.beta1 * gm + (1.0 - params.beta1) * grad;
        gv = params.beta2 * gv + (1.0 - params.beta2) * grad.square();
        double bc1 = 1.0 - std::pow(params.beta1, static_cast<double>(t));
        double bc2 = 1.0 - std::pow(params.beta2, static_cast<double>(t));
        w -= params.learning_rate * (gm / bc1) / ((gv / bc2).sqrt() + params.adam_eps);
    };

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index start = 0; start < n; start += params.batch_size) {
            Eigen::Index bs = std::min<Eigen::Index>(params.batch_size, n - start);
            Eigen::MatrixXd Xb(bs, p);
            LabelVector yb(bs);
            for (Eigen::Index i = 0; i < bs; ++i) {
                Xb.row(i) = X.row(order[static_cast<std::size_t>(start + i)]);
                yb(i) = y(order[static_cast<std::size_t>(start + i)]);
            }
            MlpGradients g = mlp_backward(m, Xb, yb);
            ++t;
            for (int l = 0; l < 4; ++l) {
                adam_step(Eigen::Map<Eigen::ArrayXd>(m.W[l].data(), m.W[l].size()),
                          Eigen::Map<Eigen::ArrayXd>(mom.W[l].data(), mom.W[l].size()),
                          Eigen::Map<Eigen::ArrayXd>(vel.W[l].data(), vel.W[l].size()),
                          Eigen::Map<const Eigen::ArrayXd>(g.W[l].data(), g.W[l].size()));
                adam_step(Eigen::Map<Eigen::ArrayXd>(m.b[l].data(), m.b[l].size()),
                          Eigen::Map<Eigen::ArrayXd>(mom.b[l].data(), mom.b[l].size()),
                          Eigen::Map<Eigen::ArrayXd>(vel.b[l].data(), vel.b[l].size()),
                          Eigen::Map<const Eigen::ArrayXd>(g.b[l].data(), g.b[l].size()));
            }
        }
        double loss = mlp_loss(m, X, y);
        if (!std::isfinite(loss))
            throw std::runtime_error("fit_mlp: training diverged (non-finite loss) at epoch " +
                                     std::to_string(epoch));
        m.epoch_loss.push_back(loss);
    }
    return m;
}

Classifier MlpModel::as_classifier(std::string name) const {
    Classifier c;
    auto copy = std::make_shared<MlpModel>(*this);
    c.score_fn = [copy](const Eigen::Ref<const Eigen::MatrixXd>& X) { return copy->score(X); };
    c.threshold = threshold;
    c.name = std::move(name);
    return c;
}

void MlpModel::save(std::ostream& os) const {
    os << "natal-mlp-model v1\n";
    os.precision(17);
    os << "threshold " << threshold << '\n';
    os << "input " << input_mean.size() << '\n';
    for (Eigen::Index j = 0; j < input_mean.size(); ++j)
        os << input_mean(j) << ' ' << input_scale(j) << '\n';
    for (int l = 0; l < 4; ++l) {
        os << "layer " << l << ' ' << W[l].rows() << ' ' << W[l].cols() << '\n';
        for (Eigen::Index i = 0; i < W[l].rows(); ++i) {
            for (Eigen::Index j = 0; j < W[l].cols(); ++j) os << W[l](i, j) << ' ';
            os << '\n';
        }
        for (Eigen::Index j = 0; j < b[l].size(); ++j) os << b[l](j) << ' ';
        os << '\n';
    }
}

MlpModel MlpModel::load(std::istream& is) {
    std::string magic, version;
    is >> magic >> version;
    if (magic != "natal-mlp-model" || version != "v1")
        throw std::runtime_error("mlp model file: unsupported format/version");
    MlpModel m;
    std::string key;
    is >> key >> m.threshold;
    if (key != "threshold") throw std::runtime_error("mlp model file: expected threshold");
    Eigen::Index p;
    is >> key >> p;
    if (key != "input") throw std::runtime_error("mlp model file: expected input block");
    m.input_mean.resize(p);
    m.input_scale.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) is >> m.input_mean(j) >> m.input_scale(j);
    for (int l = 0; l < 4; ++l) {
        Eigen::Index rows, cols;
        int idx;
        is >> key >> idx >> rows >> cols;
        if (key != "layer" || idx != l) throw std::runtime_error("mlp model file: bad layer record");
        m.W[l].resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) is >> m.W[l](i, j);
        m.b[l].resize(cols);
        for (Eigen::Index j = 0; j < cols; ++j) is >> m.b[l](j);
    }
    return m;
}

}  // namespace natal
