#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "mmr/errors.hpp"
#include "mmr/network.hpp"
#include "mmr/reach.hpp"
#include "mmr/rng.hpp"

using namespace mmr;

namespace {

Layer make_layer(const Eigen::MatrixXd& W, const Eigen::VectorXd& b, const std::string& act) {
    Layer layer;
    layer.W = W;
    layer.b = b;
    layer.acts.assign(static_cast<std::size_t>(W.rows()), builtin(act));
    return layer;
}

Network toy_tanh_net() {
    Network net;
    Eigen::MatrixXd W1(2, 1);
    W1 << 1, -1;
    net.layers.push_back(make_layer(W1, Eigen::VectorXd::Zero(2), "tanh"));
    Eigen::MatrixXd W2(1, 2);
    W2 << 1, 1;
    net.layers.push_back(make_layer(W2, Eigen::VectorXd::Zero(1), "tanh"));
    return net;
}

bool box_equal(const IntervalVector& a, const IntervalVector& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i].lo - b[i].lo) > tol || std::abs(a[i].hi - b[i].hi) > tol) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("mm_bound on a linear map with exact Jacobian") {
    const BatchFn f = [](const Eigen::MatrixXd& X) {
        Eigen::MatrixXd Y(1, X.cols());
        Y.row(0) = X.row(0) - X.row(1);
        return Y;
    };
    IntervalMatrix J(1, 2);
    J(0, 0) = Interval(1, 1);
    J(0, 1) = Interval(-1, -1);
    std::int64_t evals = 0;
    const auto r = mm_bound(f, IntervalVector{{0, 1}, {0, 1}}, J, &evals);
    CHECK(r[0].lo == doctest::Approx(-1.0));
    CHECK(r[0].hi == doctest::Approx(1.0));
    CHECK(evals == 2);
}

TEST_CASE("mm_bound on scalar tanh reduces to endpoint evaluation") {
    const BatchFn f = [](const Eigen::MatrixXd& X) {
        return Eigen::MatrixXd(X.array().tanh());
    };
    IntervalMatrix J(1, 1);
    J(0, 0) = Interval(1.0 - std::tanh(1.0) * std::tanh(1.0), 1.0);
    const auto r = mm_bound(f, IntervalVector{{-1, 1}}, J);
    CHECK(r[0].lo == doctest::Approx(std::tanh(-1.0)));
    CHECK(r[0].hi == doctest::Approx(std::tanh(1.0)));
    // Containment against a dense grid of images.
    const auto g = testutil::grid_extrema([](double x) { return std::tanh(x); }, -1, 1);
    CHECK(r[0].lo <= g.min + 1e-12);
    CHECK(r[0].hi >= g.max - 1e-12);
}

TEST_CASE("mm_bound on x^2 with straddling Jacobian bounds") {
    const BatchFn f = [](const Eigen::MatrixXd& X) {
        return Eigen::MatrixXd(X.array().square());
    };
    IntervalMatrix J(1, 1);
    J(0, 0) = Interval(-2, 4);
    const auto r = mm_bound(f, IntervalVector{{-1, 2}}, J);
    // J* = 1 >= 0, corners (-1, 2), alpha = -2, error term 6.
    CHECK(r[0].lo == doctest::Approx(-5.0));
    CHECK(r[0].hi == doctest::Approx(10.0));
    const auto g = testutil::grid_extrema([](double x) { return x * x; }, -1, 2);
    CHECK(r[0].lo <= g.min);
    CHECK(r[0].hi >= g.max);
}

TEST_CASE("mm_bound degenerate box gives the exact image") {
    const BatchFn f = [](const Eigen::MatrixXd& X) {
        Eigen::MatrixXd Y(2, X.cols());
        Y.row(0) = X.row(0).array().sin();
        Y.row(1) = X.row(0).array() * X.row(1).array();
        return Y;
    };
    IntervalMatrix J(2, 2);
    J(0, 0) = Interval(-1, 1);
    J(0, 1) = Interval(0, 0);
    J(1, 0) = Interval(-3, 3);
    J(1, 1) = Interval(-3, 3);
    const auto r = mm_bound(f, IntervalVector{{0.7, 0.7}, {-1.2, -1.2}}, J);
    CHECK(r[0].lo == doctest::Approx(std::sin(0.7)));
    CHECK(r[0].hi == doctest::Approx(std::sin(0.7)));
    CHECK(r[1].lo == doctest::Approx(-0.84));
    CHECK(r[1].hi == doctest::Approx(-0.84));
}

TEST_CASE("mm_bound deduplicates corner evaluations by sign pattern") {
    // Three output rows, two distinct sign patterns.
    const BatchFn f = [](const Eigen::MatrixXd& X) {
        Eigen::MatrixXd Y(3, X.cols());
        Y.row(0) = X.row(0) + X.row(1);
        Y.row(1) = 2.0 * (X.row(0) + X.row(1));
        Y.row(2) = X.row(0) - X.row(1);
        return Y;
    };
    IntervalMatrix J(3, 2);
    J(0, 0) = Interval(1, 1);
    J(0, 1) = Interval(1, 1);
    J(1, 0) = Interval(2, 2);
    J(1, 1) = Interval(2, 2);
    J(2, 0) = Interval(1, 1);
    J(2, 1) = Interval(-1, -1);
    std::int64_t evals = 0;
    const auto r = mm_bound(f, IntervalVector{{0, 1}, {0, 1}}, J, &evals);
    CHECK(evals == 4);
    CHECK(r[0] == Interval(0, 2));
    CHECK(r[1] == Interval(0, 4));
    CHECK(r[2] == Interval(-1, 1));
}

TEST_CASE("jacobian_update examples") {
    Eigen::MatrixXd W(1, 1);
    W << 2;
    const auto J1 = jacobian_update(IntervalVector{{0, 1}}, W, IntervalMatrix{});
    CHECK(J1(0, 0) == Interval(0, 2));

    Eigen::MatrixXd W2(2, 3);
    W2 << 1, -2, 0.5, 0, 3, -1;
    const auto J2 = jacobian_update(IntervalVector{{1, 1}, {1, 1}}, W2, IntervalMatrix{});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) CHECK(J2(i, j) == Interval(W2(i, j), W2(i, j)));

    Eigen::MatrixXd W3(1, 2);
    W3 << 1, -1;
    IntervalMatrix prev(2, 1);
    prev(0, 0) = Interval(1, 1);
    prev(1, 0) = Interval(-1, -1);
    const auto J3 = jacobian_update(IntervalVector{{0, 1}}, W3, prev);
    CHECK(J3(0, 0) == Interval(0, 2));

    CHECK_THROWS_AS(jacobian_update(IntervalVector{{0, 1}}, W2, prev), DimensionMismatch);
}

TEST_CASE("algorithm1 identity network is exact") {
    Network net;
    net.layers.push_back(
        make_layer(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3), "identity"));
    const IntervalVector box{{-1, 2}, {0, 0.5}, {3, 4}};
    const auto res = algorithm1(net, box);
    for (std::size_t i = 0; i < box.size(); ++i) CHECK(res.output()[i] == box[i]);
}

TEST_CASE("algorithm1 single ReLU layer") {
    Network net;
    net.layers.push_back(
        make_layer(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1), "relu"));
    const auto res = algorithm1(net, IntervalVector{{-1, 2}});
    CHECK(res.output()[0].lo == doctest::Approx(0.0));
    CHECK(res.output()[0].hi == doctest::Approx(2.0));
    CHECK(res.pair_count == 1);
}

TEST_CASE("algorithm1 tanh toy: sound and tighter than IBP") {
    const Network net = toy_tanh_net();
    const IntervalVector box{{-0.5, 0.5}};
    ReachOptions opts;
    opts.keep_partial = true;
    const auto res = algorithm1(net, box, opts);
    CHECK(res.pair_count == 3);
    CHECK(res.per_pair.size() == 3);

    // Grid image containment.
    for (int i = 0; i < 10000; ++i) {
        Eigen::VectorXd x(1);
        x << -0.5 + 1.0 * i / 9999;
        const Eigen::VectorXd y = forward(net, {1, 2}, x);
        REQUIRE(res.output()[0].contains(y(0), 1e-12));
    }
    const auto base = ibp(net, box);
    CHECK(iv_contains_box(base.output(), res.output(), 1e-9));

    // Intersection property: per-layer box inside every pair box ending
    // at that layer.
    for (const auto& [key, pbox] : res.per_pair) {
        const auto& layer_box = res.per_layer[static_cast<std::size_t>(key.second - 1)];
        CHECK(iv_contains_box(pbox, layer_box, 1e-12));
    }
}

TEST_CASE("ibp examples") {
    Network net;
    net.layers.push_back(
        make_layer(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1), "relu"));
    const auto res = ibp(net, IntervalVector{{-1, 2}});
    CHECK(res.output()[0] == Interval(0, 2));

    Network si;
    si.layers.push_back(
        make_layer(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1), "silu"));
    const auto r2 = ibp(si, IntervalVector{{-3, 0}});
    auto phi = builtin("silu")->phi;
    CHECK(r2.output()[0].lo == doctest::Approx(phi.eval(phi.argmin)));
    CHECK(r2.output()[0].lo == doctest::Approx(-0.2785).epsilon(1e-3));
    CHECK(r2.output()[0].hi == doctest::Approx(0.0));
    const auto g = testutil::grid_extrema(phi.eval, -3, 0);
    CHECK(r2.output()[0].lo <= g.min + 1e-12);
    CHECK(r2.output()[0].hi >= g.max - 1e-12);
}

TEST_CASE("soundness and IBP domination on random networks") {
    for (const std::string act : {"relu", "tanh", "elu", "silu"}) {
        RandomNetConfig cfg = RandomNetConfig::small_preset();
        cfg.activation = act;
        for (int i = 0; i < 30; ++i) {
            const std::uint64_t seed = 500 + static_cast<std::uint64_t>(i);
            const Network net = random_network(cfg, seed);
            const IntervalVector box = random_input_box(net, derive_seed(seed, 1));
            const auto mm = algorithm1(net, box);
            const auto base = ibp(net, box);

            REQUIRE(iv_contains_box(base.output(), mm.output(), 1e-9));

            SplitMix64 rng(derive_seed(seed, 2));
            for (int s = 0; s < 200; ++s) {
                const Eigen::VectorXd x = testutil::sample_in_box(box, rng);
                const Eigen::VectorXd y = forward(net, {1, net.depth()}, x);
                REQUIRE(iv_contains_point(mm.output(), y, 1e-7));
                REQUIRE(iv_contains_point(base.output(), y, 1e-7));
            }
            if (net.input_dim() <= 10) {
                for (const auto& corner : testutil::box_corners(box)) {
                    const Eigen::VectorXd y = forward(net, {1, net.depth()}, corner);
                    REQUIRE(iv_contains_point(mm.output(), y, 1e-7));
                }
            }
        }
    }
}

TEST_CASE("decomposition chains contain the algorithm1 box") {
    RandomNetConfig cfg = RandomNetConfig::small_preset();
    cfg.depth = {4, 4};
    cfg.activation = "tanh";
    for (int i = 0; i < 10; ++i) {
        const std::uint64_t seed = 9000 + static_cast<std::uint64_t>(i);
        const Network net = random_network(cfg, seed);
        const IntervalVector box = random_input_box(net, derive_seed(seed, 1));
        const auto res = algorithm1(net, box);
        const int L = net.depth();
        for (int mask = 0; mask < (1 << (L - 1)); ++mask) {
            std::vector<int> cuts;
            for (int l = 1; l < L; ++l) {
                if (mask & (1 << (l - 1))) cuts.push_back(l);
            }
            cuts.push_back(L);
            const auto chained = mm_decomposition(net, box, cuts);
            REQUIRE(iv_contains_box(chained, res.output(), 1e-9));
        }
    }
}

TEST_CASE("eval_count reflects the O(L^2) pair structure") {
    RandomNetConfig cfg = RandomNetConfig::small_preset();
    cfg.depth = {5, 5};
    cfg.activation = "relu";
    const Network net = random_network(cfg, 321);
    const IntervalVector box = random_input_box(net, 322);
    const auto res = algorithm1(net, box);
    const int L = net.depth();
    CHECK(res.pair_count == L * (L + 1) / 2);
    // At most 2 * n_l corner evaluations per pair (k, l), at least 2.
    std::int64_t upper = 0;
    for (int l = 1; l <= L; ++l) upper += static_cast<std::int64_t>(l) * 2 * net.layer_dim(l);
    CHECK(res.eval_count >= 2 * res.pair_count);
    CHECK(res.eval_count <= upper);
}

TEST_CASE("parallel inner loop is bit-identical to sequential") {
    RandomNetConfig cfg = RandomNetConfig::small_preset();
    cfg.depth = {5, 5};
    for (const std::string act : {"tanh", "silu"}) {
        cfg.activation = act;
        const Network net = random_network(cfg, 777);
        const IntervalVector box = random_input_box(net, 778);
        ReachOptions seq;
        ReachOptions par;
        par.parallel = true;
        par.threads = 4;
        const auto a = algorithm1(net, box, seq);
        const auto b = algorithm1(net, box, par);
        REQUIRE(a.per_layer.size() == b.per_layer.size());
        for (std::size_t l = 0; l < a.per_layer.size(); ++l) {
            REQUIRE(box_equal(a.per_layer[l], b.per_layer[l], 0.0));
        }
        CHECK(a.eval_count == b.eval_count);
    }
}

TEST_CASE("dimension errors") {
    const Network net = toy_tanh_net();
    CHECK_THROWS_AS(algorithm1(net, IntervalVector{{0, 1}, {0, 1}}), DimensionMismatch);
    CHECK_THROWS_AS(ibp(net, IntervalVector{{0, 1}, {0, 1}}), DimensionMismatch);
    CHECK_THROWS_AS(mm_decomposition(net, IntervalVector{{0, 1}}, {1}), DimensionMismatch);
}
