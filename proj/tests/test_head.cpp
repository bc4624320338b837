#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "raci/head.hpp"
#include "raci/errors.hpp"
#include "raci/rng.hpp"

#include <cmath>

using namespace raci;
using namespace raci::head;
using raci::geom::RelativePose;
using raci::geom::Vector6d;

TEST_CASE("default pose weights are the published calibration") {
    auto w = default_pose_weights();
    CHECK(w.w[0] == 10.34);
    CHECK(w.w[1] == 0.33);
    CHECK(w.w[2] == 56.09);
    CHECK(w.w[3] == 178.05);
    CHECK(w.w[4] == 227.27);
    CHECK(w.w[5] == 39.05);
    CHECK(w.lambda == 1.0);
}

TEST_CASE("compute_pose_weights formula") {
    Vector6d means, stds;
    means << 1, -2, 0.5, 0, 4, 0.1;
    stds << 1, 1, 0.5, 2, 0, 0.9;
    auto w = compute_pose_weights(means, stds, 1.0);
    CHECK(w.w[0] == doctest::Approx(1.0 / 2.0).epsilon(1e-14));
    CHECK(w.w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));  // |mean| used
    CHECK(w.w[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w.w[3] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w.w[4] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(w.w[5] == doctest::Approx(1.0).epsilon(1e-14));

    auto half = compute_pose_weights(means, stds, 0.5);
    CHECK(half.w[0] == doctest::Approx(1.0 / 1.5).epsilon(1e-14));
    CHECK(half.lambda == 0.5);
}

TEST_CASE("compute_pose_weights rejects a zero denominator") {
    Vector6d means = Vector6d::Zero(), stds = Vector6d::Zero();
    CHECK_THROWS_AS(compute_pose_weights(means, stds, 1.0), config_error);
}

TEST_CASE("weighted_mse basics") {
    PoseWeights w;
    w.w = Vector6d::Ones();
    RelativePose a{1, 2, 3, 0.1, 0.2, 0.3};
    CHECK(weighted_mse(a, a, w) == 0.0);

    RelativePose zero{};
    RelativePose unit{1, 0, 0, 0, 0, 0};
    CHECK(weighted_mse(unit, zero, w) == 1.0);
    // symmetric in (pred, truth)
    CHECK(weighted_mse(unit, zero, w) == weighted_mse(zero, unit, w));

    w.w << 2, 0, 0, 0, 0, 0;
    CHECK(weighted_mse(unit, zero, w) == 2.0);

    // quadratic scaling
    RelativePose two{2, 0, 0, 0, 0, 0};
    CHECK(weighted_mse(two, zero, w) == 8.0);
}

TEST_CASE("weighted_mse with the published weights") {
    PoseWeights w = default_pose_weights();
    RelativePose pred{0.1, 0, 0, 0, 0, 0.01};
    RelativePose truth{};
    CHECK(weighted_mse(pred, truth, w) ==
          doctest::Approx(10.34 * 0.01 + 39.05 * 1e-4).epsilon(1e-14));
}

TEST_CASE("weighted_mse_grad matches finite differences") {
    PoseWeights w = default_pose_weights();
    RelativePose pred{0.3, -0.1, 0.05, 0.02, -0.01, 0.2};
    RelativePose truth{0.25, 0.0, 0.0, 0.0, 0.0, 0.15};
    auto g = weighted_mse_grad(pred, truth, w);
    const double h = 1e-7;
    for (int i = 0; i < 6; ++i) {
        Vector6d vp = pred.vec(), vm = pred.vec();
        vp[i] += h;
        vm[i] -= h;
        const double fd = (weighted_mse(RelativePose::from_vec(vp), truth, w) -
                           weighted_mse(RelativePose::from_vec(vm), truth, w)) /
                          (2 * h);
        CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("pose_regress linear-path oracle") {
    HeadParams p;
    const int H = 4;
    p.W1 = Eigen::MatrixXd::Zero(H, H);
    p.b1 = Eigen::VectorXd::Zero(H);
    p.W2 = Eigen::MatrixXd::Zero(6, H);
    p.b2 = Eigen::VectorXd::Zero(6);
    p.W1(0, 0) = 1.0;
    p.W1(1, 1) = -1.0;
    p.W2(0, 0) = 2.0;  // dx reads hidden 0
    p.W2(3, 1) = 3.0;  // droll reads hidden 1
    p.b2[5] = 0.25;

    Eigen::VectorXd h(H);
    h << 0.5, 0.5, 0, 0;
    auto pose = pose_regress(h, p);
    CHECK(pose.dx == doctest::Approx(1.0).epsilon(1e-14));
    // pre1[1] = -0.5 -> leaky -0.005 -> droll = -0.015
    CHECK(pose.droll == doctest::Approx(-0.015).epsilon(1e-12));
    CHECK(pose.dyaw == 0.25);  // final layer is affine, no activation
    CHECK(pose.dy == 0.0);
}

TEST_CASE("temporal_step is the shared LSTM cell") {
    auto rng = named_stream(51, "head/lstm");
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    encoders::LstmParams lp;
    lp.Wx = Eigen::MatrixXd(8, 3);
    lp.Wh = Eigen::MatrixXd(8, 2);
    lp.b = Eigen::VectorXd(8);
    for (int i = 0; i < lp.Wx.size(); ++i) lp.Wx.data()[i] = u(rng);
    for (int i = 0; i < lp.Wh.size(); ++i) lp.Wh.data()[i] = u(rng);
    for (int i = 0; i < lp.b.size(); ++i) lp.b[i] = u(rng);
    Eigen::VectorXd x(3);
    x << 0.1, -0.2, 0.3;
    auto from_head = temporal_step(x, encoders::LstmState::zero(2), lp);
    auto from_cell = encoders::lstm_step(x, encoders::LstmState::zero(2), lp);
    CHECK((from_head.h - from_cell.h).norm() == 0.0);
    CHECK((from_head.c - from_cell.c).norm() == 0.0);
}

TEST_CASE("pose_regress_backward matches finite differences") {
    auto rng = named_stream(52, "head/fd");
    std::normal_distribution<double> g(0, 0.5);
    const int H = 5;
    HeadParams p;
    p.W1 = Eigen::MatrixXd(H, H);
    p.b1 = Eigen::VectorXd(H);
    p.W2 = Eigen::MatrixXd(6, H);
    p.b2 = Eigen::VectorXd(6);
    for (int i = 0; i < p.W1.size(); ++i) p.W1.data()[i] = g(rng);
    for (int i = 0; i < H; ++i) p.b1[i] = g(rng);
    for (int i = 0; i < p.W2.size(); ++i) p.W2.data()[i] = g(rng);
    for (int i = 0; i < 6; ++i) p.b2[i] = g(rng);
    Eigen::VectorXd h(H);
    for (int i = 0; i < H; ++i) h[i] = g(rng);

    Vector6d g_pose;
    g_pose << 1, -1, 0.5, 2, -0.5, 0.25;
    RegressCache cache;
    pose_regress(h, p, &cache);
    auto grads = RegressGrads::zero(p);
    auto g_h = pose_regress_backward(g_pose, cache, p, grads);

    const double eps = 1e-6;
    auto loss = [&](const HeadParams& pp, const Eigen::VectorXd& hh) {
        return g_pose.dot(pose_regress(hh, pp).vec());
    };
    for (int i = 0; i < H; ++i) {
        Eigen::VectorXd hp = h, hm = h;
        hp[i] += eps;
        hm[i] -= eps;
        CHECK(g_h[i] == doctest::Approx((loss(p, hp) - loss(p, hm)) / (2 * eps)).epsilon(1e-5));
    }
    for (int i = 0; i < p.W1.size(); ++i) {
        HeadParams pp = p, pm = p;
        pp.W1.data()[i] += eps;
        pm.W1.data()[i] -= eps;
        CHECK(grads.dW1.data()[i] ==
              doctest::Approx((loss(pp, h) - loss(pm, h)) / (2 * eps)).epsilon(1e-5));
    }
    for (int i = 0; i < 6; ++i) {
        HeadParams pp = p, pm = p;
        pp.b2[i] += eps;
        pm.b2[i] -= eps;
        CHECK(grads.db2[i] ==
              doctest::Approx((loss(pp, h) - loss(pm, h)) / (2 * eps)).epsilon(1e-5));
    }
}
