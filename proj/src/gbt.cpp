#include "natal/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "natal/linear_models.hpp"  // sigmoid

namespace natal {

double RegressionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    int id = 0;
    while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(id)];
        id = row(nd.feature) < nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(id)].weight;
}

namespace {

struct NodeStats {
    double G = 0.0, H = 0.0;
};

double structure_score(double G, double H, double lambda) { return G * G / (H + lambda); }

SplitChoice scan_column(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXd& grad,
                        const Eigen::VectorXd& hess, const std::vector<Eigen::Index>& rows, int col,
                        const NodeStats& total, double lambda, double gamma_split,
                        double min_child_weight) {
    struct Entry {
        double v, g, h;
    };
    std::vector<Entry> e;
    e.reserve(rows.size());
    for (Eigen::Index r : rows) e.push_back({X(r, col), grad(r), hess(r)});
    std::sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) { return a.v < b.v; });

    SplitChoice best;
    double GL = 0.0, HL = 0.0;
    const double parent = structure_score(total.G, total.H, lambda);
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        GL += e[i].g;
        HL += e[i].h;
        if (e[i].v == e[i + 1].v) continue;  // threshold only between distinct values
        double GR = total.G - GL, HR = total.H - HL;
        if (HL < min_child_weight || HR < min_child_weight) continue;
        double gain = 0.5 * (structure_score(GL, HL, lambda) + structure_score(GR, HR, lambda) - parent) -
                      gamma_split;
        double thr = 0.5 * (e[i].v + e[i + 1].v);
        if (gain > best.gain || (gain == best.gain && best.feature == col && thr < best.threshold)) {
            best.feature = col;
            best.threshold = thr;
            best.gain = gain;
        }
    }
    return best;
}

// sequential-equivalent reduction: lower gain loses; ties go to the lower
// column index, then the lower threshold
void reduce_choice(SplitChoice& acc, const SplitChoice& cand) {
    if (cand.feature < 0) return;
    if (acc.feature < 0 || cand.gain > acc.gain ||
        (cand.gain == acc.gain &&
         (cand.feature < acc.feature ||
          (cand.feature == acc.feature && cand.threshold < acc.threshold))))
        acc = cand;
}

}  // namespace

SplitChoice best_split(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXd& grad,
                       const Eigen::VectorXd& hess, const std::vector<Eigen::Index>& rows,
                       const std::vector<int>& cols, double lambda, double gamma_split,
                       double min_child_weight, int threads) {
    NodeStats total;
    for (Eigen::Index r : rows) {
        total.G += grad(r);
        total.H += hess(r);
    }
    std::vector<SplitChoice> per_col(cols.size());
    auto scan_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c)
            per_col[c] = scan_column(X, grad, hess, rows, cols[c], total, lambda, gamma_split,
                                     min_child_weight);
    };
    if (threads > 1 && cols.size() > 1) {
        std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), cols.size());
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nt; ++t) {
            std::size_t lo = cols.size() * t / nt, hi = cols.size() * (t + 1) / nt;
            pool.emplace_back(scan_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    } else {
        scan_range(0, cols.size());
    }
    SplitChoice best;
    for (const auto& c : per_col) reduce_choice(best, c);
    return best;
}

namespace {

double clamp_rate(double r) { return std::min(std::max(r, 1e-6), 1.0 - 1e-6); }

double mean_logistic_loss(const Eigen::VectorXd& margin, const LabelVector& y) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < margin.size(); ++i) {
        double z = margin(i);
        double log1pe = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += log1pe - y(i) * z;
    }
    return loss / static_cast<double>(margin.size());
}

std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, Eigen::Index k,
                                                     std::mt19937_64& rng) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

GbtModel fit_gbt(const Eigen::Ref<const Eigen::MatrixXd>& X, const LabelVector& y,
                 const GbtParams& params) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n == 0 || p == 0) throw std::invalid_argument("fit_gbt: empty input");

    GbtModel model;
    model.params = params;
    model.column_gain = Eigen::VectorXd::Zero(p);

    double pos = y.sum();
    double rate = params.base_score >= 0.0 ? params.base_score : clamp_rate(pos / static_cast<double>(n));
    model.base_logit = std::log(rate / (1.0 - rate));

    if (pos == 0.0 || pos == static_cast<double>(n)) {
        model.degenerate = true;  // constant labels: base score only
        return model;
    }

    Eigen::VectorXd margin = Eigen::VectorXd::Constant(n, model.base_logit);
    Eigen::VectorXd grad(n), hess(n);
    model.train_loss.reserve(static_cast<std::size_t>(params.n_estimators));

    const auto n_sub = static_cast<Eigen::Index>(
        std::max<double>(1.0, std::llround(params.subsample * static_cast<double>(n))));
    const auto p_sub = static_cast<Eigen::Index>(
        std::max<double>(1.0, std::llround(params.colsample_bytree * static_cast<double>(p))));

    for (int round = 0; round < params.n_estimators; ++round) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double prob = sigmoid(margin(i));
            grad(i) = prob - y(i);
            hess(i) = prob * (1.0 - prob);
        }

        // independent seeded streams for row and column draws
        std::mt19937_64 row_rng(params.seed * 0x9E3779B97F4A7C15ULL + 2 * static_cast<std::uint64_t>(round));
        std::mt19937_64 col_rng(params.seed * 0xC2B2AE3D27D4EB4FULL + 2 * static_cast<std::uint64_t>(round) + 1);
        std::vector<Eigen::Index> rows = n_sub < n ? sample_without_replacement(n, n_sub, row_rng)
                                                   : [&] {
                                                         std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
                                                         std::iota(all.begin(), all.end(), Eigen::Index{0});
                                                         return all;
                                                     }();
        std::vector<int> cols;
        if (p_sub < p) {
            std::vector<int> all(static_cast<std::size_t>(p));
            std::iota(all.begin(), all.end(), 0);
            std::shuffle(all.begin(), all.end(), col_rng);
            all.resize(static_cast<std::size_t>(p_sub));
            std::sort(all.begin(), all.end());
            cols = std::move(all);
        } else {
            cols.resize(static_cast<std::size_t>(p));
            std::iota(cols.begin(), cols.end(), 0);
        }

        RegressionTree tree;
        struct Frame {
            int node;
            int depth;
            std::vector<Eigen::Index> rows;
        };
        tree.nodes.push_back({});
        std::vector<Frame> stack;
        stack.push_back({0, 0, std::move(rows)});
        while (!stack.empty()) {
            Frame fr = std::move(stack.back());
            stack.pop_back();
            NodeStats st;
            for (Eigen::Index r : fr.rows) {
                st.G += grad(r);
                st.H += hess(r);
            }
            TreeNode& nd0 = tree.nodes[static_cast<std::size_t>(fr.node)];
            nd0.weight = -st.G / (st.H + params.lambda);
            if (fr.depth >= params.max_depth) continue;
            SplitChoice sc = best_split(X, grad, hess, fr.rows, cols, params.lambda,
                                        params.gamma_split, params.min_child_weight, params.threads);
            if (sc.feature < 0 || sc.gain <= 0.0) continue;
            std::vector<Eigen::Index> left, right;
            for (Eigen::Index r : fr.rows)
                (X(r, sc.feature) < sc.threshold ? left : right).push_back(r);
            int li = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back({});
            int ri = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back({});
            TreeNode& nd = tree.nodes[static_cast<std::size_t>(fr.node)];
            nd.feature = sc.feature;
            nd.threshold = sc.threshold;
            nd.gain = sc.gain;
            nd.left = li;
            nd.right = ri;
            model.column_gain(sc.feature) += sc.gain;
            stack.push_back({ri, fr.depth + 1, std::move(right)});
            stack.push_back({li, fr.depth + 1, std::move(left)});
        }

        for (Eigen::Index i = 0; i < n; ++i)
            margin(i) += params.learning_rate * tree.predict(X.row(i));
        model.trees.push_back(std::move(tree));
        model.train_loss.push_back(mean_logistic_loss(margin, y));
    }
    return model;
}

Eigen::VectorXd GbtModel::score(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    if (!trees.empty() && X.cols() <= 0)
        throw std::invalid_argument("GbtModel::score: empty matrix");
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double z = base_logit;
        for (const auto& t : trees) z += params.learning_rate * t.predict(X.row(i));
        out(i) = sigmoid(z);
    }
    return out;
}

Classifier GbtModel::as_classifier(std::string name) const {
    Classifier c;
    auto copy = std::make_shared<GbtModel>(*this);
    c.score_fn = [copy](const Eigen::Ref<const Eigen::MatrixXd>& X) { return copy->score(X); };
    c.threshold = threshold;
    c.name = std::move(name);
    return c;
}

std::vector<std::pair<std::string, double>> feature_importance(
    const GbtModel& model, const std::vector<ColumnInfo>& columns) {
    if (static_cast<Eigen::Index>(columns.size()) != model.column_gain.size())
        throw std::invalid_argument("feature_importance: column metadata size mismatch");
    std::vector<std::pair<std::string, double>> out;  // first-appearance (schema) order
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const std::string& src = columns[c].source;
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == src; });
        if (it == out.end())
            out.emplace_back(src, model.column_gain(static_cast<Eigen::Index>(c)));
        else
            it->second += model.column_gain(static_cast<Eigen::Index>(c));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

void GbtModel::save(std::ostream& os) const {
    os << "natal-gbt-model v1\n";
    os.precision(17);
    os << "base_logit " << base_logit << '\n';
    os << "learning_rate " << params.learning_rate << '\n';
    os << "threshold " << threshold << '\n';
    os << "degenerate " << (degenerate ? 1 : 0) << '\n';
    os << "columns " << column_gain.size() << '\n';
    os << "trees " << trees.size() << '\n';
    for (std::size_t t = 0; t < trees.size(); ++t) {
        os << "tree " << t << ' ' << trees[t].nodes.size() << '\n';
        for (std::size_t i = 0; i < trees[t].nodes.size(); ++i) {
            const TreeNode& nd = trees[t].nodes[i];
            if (nd.feature >= 0)
                os << i << " split " << nd.feature << ' ' << nd.threshold << ' ' << nd.left << ' '
                   << nd.right << ' ' << nd.gain << '\n';
            else
                os << i << " leaf " << nd.weight << '\n';
        }
    }
}

GbtModel GbtModel::load(std::istream& is) {
    std::string magic, version;
    is >> magic >> version;
    if (magic != "natal-gbt-model" || version != "v1")
        throw std::runtime_error("gbt model file: unsupported format/version");
    GbtModel m;
    std::string key;
    std::size_t ntrees = 0;
    Eigen::Index ncols = 0;
    while (is >> key) {
        if (key == "base_logit") is >> m.base_logit;
        else if (key == "learning_rate") is >> m.params.learning_rate;
        else if (key == "threshold") is >> m.threshold;
        else if (key == "degenerate") {
            int v;
            is >> v;
            m.degenerate = v != 0;
        } else if (key == "columns") {
            is >> ncols;
            m.column_gain = Eigen::VectorXd::Zero(ncols);
        } else if (key == "trees") {
            is >> ntrees;
            break;
        } else {
            throw std::runtime_error("gbt model file: unknown key " + key);
        }
    }
    for (std::size_t t = 0; t < ntrees; ++t) {
        std::size_t idx, nnodes;
        is >> key >> idx >> nnodes;
        if (key != "tree") throw std::runtime_error("gbt model file: expected tree record");
        RegressionTree tree;
        tree.nodes.resize(nnodes);
        for (std::size_t i = 0; i < nnodes; ++i) {
            std::size_t id;
            std::string kind;
            is >> id >> kind;
            TreeNode nd;
            if (kind == "split") {
                is >> nd.feature >> nd.threshold >> nd.left >> nd.right >> nd.gain;
                if (nd.feature >= 0 && ncols > 0) m.column_gain(nd.feature) += nd.gain;
            } else if (kind == "leaf") {
                is >> nd.weight;
            } else {
                throw std::runtime_error("gbt model file: unknown node kind " + kind);
            }
            tree.nodes[id] = nd;
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

}  // namespace natal
