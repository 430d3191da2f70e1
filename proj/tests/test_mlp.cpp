#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "natal/metrics.hpp"
#include "natal/mlp.hpp"

using namespace natal;

namespace {

// small handmade network with identity input standardization
MlpModel make_model(int p, int h1, int h2, int h3, std::uint64_t seed, double scale) {
    MlpModel m;
    m.input_mean = Eigen::VectorXd::Zero(p);
    m.input_scale = Eigen::VectorXd::Ones(p);
    std::array<int, 5> widths = {p, h1, h2, h3, 1};
    std::mt19937_64 rng(seed);
    for (int l = 0; l < 4; ++l) {
        m.W[l].resize(widths[l], widths[l + 1]);
        for (Eigen::Index i = 0; i < m.W[l].size(); ++i)
            m.W[l].data()[i] = scale * (2.0 * testutil::uniform01(rng) - 1.0);
        m.b[l].resize(widths[l + 1]);
        for (Eigen::Index j = 0; j < m.b[l].size(); ++j)
            m.b[l](j) = scale * (2.0 * testutil::uniform01(rng) - 1.0);
    }
    return m;
}

std::string dump(const MlpModel& m) {
    std::ostringstream os;
    m.save(os);
    return os.str();
}

}  // namespace

TEST_CASE("mlp_forward: all-zero weights score 0.5 everywhere") {
    auto m = make_model(3, 4, 3, 2, 0, 0.0);
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(7, 3);
    Eigen::VectorXd s = mlp_forward(m, X);
    for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(s(i) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("mlp_forward: relu blocks negative pre-activations") {
    // single path: 1 -> 1 -> 1 -> 1 -> 1 with a negative first weight; for a
    // positive input the first hidden unit clamps to 0 and only the biases of
    // the later layers (all zero) reach the logit
    auto m = make_model(1, 1, 1, 1, 0, 0.0);
    m.W[0](0, 0) = -2.0;
    m.W[1](0, 0) = 5.0;
    m.W[2](0, 0) = 5.0;
    m.W[3](0, 0) = 5.0;
    Eigen::MatrixXd X(2, 1);
    X << 3.0, -1.0;
    Eigen::VectorXd s = mlp_forward(m, X);
    CHECK(s(0) == doctest::Approx(0.5).epsilon(1e-15));  // relu clamp, logit 0
    CHECK(s(1) > 0.5);                                   // negative input passes the gate
}

TEST_CASE("mlp_loss: extreme logits stay finite through the stable formulation") {
    auto m = make_model(1, 1, 1, 1, 0, 0.0);
    m.W[0](0, 0) = 1.0;
    m.W[1](0, 0) = 10.0;
    m.W[2](0, 0) = 10.0;
    m.W[3](0, 0) = 10.0;
    Eigen::MatrixXd X(1, 1);
    X << 1.0;  // logit = 1000
    LabelVector y1(1), y0(1);
    y1 << 1.0;
    y0 << 0.0;
    CHECK(mlp_forward(m, X)(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mlp_loss(m, X, y1) == doctest::Approx(0.0));
    CHECK(mlp_loss(m, X, y0) == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(std::isfinite(mlp_loss(m, X, y0)));
}

TEST_CASE("mlp_backward: matches central finite differences on every layer") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 5; ++trial) {
        auto m = make_model(3, 4, 3, 2, 1000 + trial, 0.4);
        const int B = 6;
        Eigen::MatrixXd X(B, 3);
        LabelVector y(B);
        for (int i = 0; i < B; ++i) {
            for (int j = 0; j < 3; ++j) X(i, j) = 2.0 * testutil::uniform01(rng) - 1.0;
            y(i) = testutil::uniform01(rng) < 0.5 ? 1.0 : 0.0;
        }
        auto g = mlp_backward(m, X, y);
        const double h = 1e-6;
        auto check_entry = [&](double& w, double analytic) {
            double orig = w;
            w = orig + h;
            double up = mlp_loss(m, X, y);
            w = orig - h;
            double down = mlp_loss(m, X, y);
            w = orig;
            double fd = (up - down) / (2.0 * h);
            CHECK(std::abs(fd - analytic) <= 1e-4 * std::max(1.0, std::abs(fd)));
        };
        for (int l = 0; l < 4; ++l) {
            for (Eigen::Index k = 0; k < m.W[l].size(); ++k)
                check_entry(m.W[l].data()[k], g.W[l].data()[k]);
            for (Eigen::Index k = 0; k < m.b[l].size(); ++k) check_entry(m.b[l](k), g.b[l](k));
        }
    }
}

TEST_CASE("mlp_backward: duplicating the batch leaves the mean gradient unchanged") {
    auto m = make_model(2, 3, 2, 2, 5, 0.3);
    Eigen::MatrixXd X(4, 2);
    X << 0.3, -0.7, 1.1, 0.2, -0.5, 0.9, 0.0, 0.4;
    LabelVector y(4);
    y << 1, 0, 0, 1;
    Eigen::MatrixXd X2(8, 2);
    X2 << X, X;
    LabelVector y2(8);
    y2 << y, y;
    auto g1 = mlp_backward(m, X, y);
    auto g2 = mlp_backward(m, X2, y2);
    for (int l = 0; l < 4; ++l) {
        CHECK((g1.W[l] - g2.W[l]).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((g1.b[l] - g2.b[l]).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("mlp_backward: confident correct predictions give a vanishing gradient") {
    auto m = make_model(1, 1, 1, 1, 0, 0.0);
    m.W[0](0, 0) = 1.0;
    m.W[1](0, 0) = 4.0;
    m.W[2](0, 0) = 4.0;
    m.W[3](0, 0) = 4.0;  // logit 64 for x=1
    Eigen::MatrixXd X(3, 1);
    X << 1.0, 1.0, 1.0;
    LabelVector y(3);
    y << 1.0, 1.0, 1.0;
    auto g = mlp_backward(m, X, y);
    for (int l = 0; l < 4; ++l) {
        CHECK(g.W[l].cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(g.b[l].cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("fit_mlp: separates a two-cluster toy problem") {
    const int n = 120;
    std::mt19937_64 rng(31);
    Eigen::MatrixXd X(n, 2);
    LabelVector y(n);
    for (int i = 0; i < n; ++i) {
        y(i) = i % 2 == 0 ? 1.0 : 0.0;
        double cx = y(i) != 0.0 ? 2.0 : -2.0;
        X(i, 0) = cx + 0.4 * (2.0 * testutil::uniform01(rng) - 1.0);
        X(i, 1) = 0.4 * (2.0 * testutil::uniform01(rng) - 1.0);
    }
    MlpParams params;
    params.hidden = {16, 8, 4};  // wide enough to avoid a dead final relu layer
    params.epochs = 120;
    params.batch_size = 16;
    params.learning_rate = 5e-3;
    params.init_scale = 0.5;
    params.seed = 2;
    auto m = fit_mlp(X, y, params);
    REQUIRE(m.epoch_loss.size() == 120);
    CHECK(m.epoch_loss.back() <= 0.5 * m.epoch_loss.front());
    LabelVector pred = m.as_classifier().predict(X);
    CHECK((pred - y).cwiseAbs().sum() == 0.0);
    CHECK(roc_auc(m.score(X), y) == doctest::Approx(1.0));
}

TEST_CASE("fit_mlp: same seed is bitwise reproducible, different seed is not") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(60, 3);
    LabelVector y(60);
    for (int i = 0; i < 60; ++i) y(i) = i % 4 == 0 ? 1.0 : 0.0;
    MlpParams params;
    params.hidden = {6, 4, 2};
    params.epochs = 5;
    params.batch_size = 16;
    params.seed = 9;
    auto a = fit_mlp(X, y, params);
    auto b = fit_mlp(X, y, params);
    CHECK(dump(a) == dump(b));
    params.seed = 10;
    auto c = fit_mlp(X, y, params);
    CHECK(dump(a) != dump(c));
}

TEST_CASE("fit_mlp: zero learning rate leaves the seeded initialization in place") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(20, 2);
    LabelVector y(20);
    for (int i = 0; i < 20; ++i) y(i) = i < 6 ? 1.0 : 0.0;
    MlpParams params;
    params.hidden = {3, 2, 2};
    params.epochs = 3;
    params.learning_rate = 0.0;
    params.seed = 42;
    auto m = fit_mlp(X, y, params);

    // replay the documented initialization: uniform in [-init_scale, init_scale]
    // drawn from mt19937_64(seed) in column-major storage order, biases zero
    std::mt19937_64 rng(params.seed);
    std::array<int, 5> widths = {2, 3, 2, 2, 1};
    for (int l = 0; l < 4; ++l) {
        REQUIRE(m.W[l].rows() == widths[l]);
        REQUIRE(m.W[l].cols() == widths[l + 1]);
        for (Eigen::Index k = 0; k < m.W[l].size(); ++k) {
            double want = params.init_scale * (2.0 * testutil::uniform01(rng) - 1.0);
            CHECK(m.W[l].data()[k] == want);
        }
        CHECK(m.b[l].cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("fit_mlp: non-finite loss reports the epoch and aborts") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 2);
    X(3, 1) = std::numeric_limits<double>::quiet_NaN();
    LabelVector y(10);
    for (int i = 0; i < 10; ++i) y(i) = i < 3 ? 1.0 : 0.0;
    MlpParams params;
    params.hidden = {3, 2, 2};
    params.epochs = 2;
    try {
        fit_mlp(X, y, params);
        FAIL("expected fit_mlp to throw on non-finite loss");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}

TEST_CASE("MlpModel: save/load round trip and input width guard") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(30, 3);
    LabelVector y(30);
    for (int i = 0; i < 30; ++i) y(i) = i % 3 == 0 ? 1.0 : 0.0;
    MlpParams params;
    params.hidden = {4, 3, 2};
    params.epochs = 4;
    auto m = fit_mlp(X, y, params);
    std::stringstream ss;
    m.save(ss);
    auto back = MlpModel::load(ss);
    CHECK(testutil::bitwise_equal(back.score(X), m.score(X)));
    CHECK(back.threshold == m.threshold);

    Eigen::MatrixXd wrong = Eigen::MatrixXd::Random(4, 2);
    CHECK_THROWS(m.score(wrong));

    std::stringstream bad("not-a-model v9\n");
    CHECK_THROWS(MlpModel::load(bad));
}
