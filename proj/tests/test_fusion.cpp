#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "raci/fusion.hpp"
#include "raci/encoders.hpp"
#include "raci/rng.hpp"

#include <cmath>

using namespace raci;
using namespace raci::fusion;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

MaskNet zero_net(int in, int hidden, int out) {
    MaskNet n;
    n.W1 = Eigen::MatrixXd::Zero(hidden, in);
    n.b1 = Eigen::VectorXd::Zero(hidden);
    n.W2 = Eigen::MatrixXd::Zero(out, hidden);
    n.b2 = Eigen::VectorXd::Zero(out);
    return n;
}

MaskNet random_net(std::mt19937_64& rng, int in, int hidden, int out, double scale = 0.6) {
    std::uniform_real_distribution<double> u(-scale, scale);
    MaskNet n = zero_net(in, hidden, out);
    for (int i = 0; i < n.W1.size(); ++i) n.W1.data()[i] = u(rng);
    for (int i = 0; i < n.b1.size(); ++i) n.b1[i] = u(rng);
    for (int i = 0; i < n.W2.size(); ++i) n.W2.data()[i] = u(rng);
    for (int i = 0; i < n.b2.size(); ++i) n.b2[i] = u(rng);
    return n;
}

Eigen::VectorXd random_vec(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> g(0, scale);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

FusionParams random_fusion(std::mt19937_64& rng, int f, int hidden) {
    FusionParams p;
    p.self_M = random_net(rng, f, hidden, f);
    p.self_V = random_net(rng, f, hidden, f);
    p.self_I = random_net(rng, f, hidden, f);
    p.cross_M = random_net(rng, 2 * f, hidden, f);
    p.cross_V = random_net(rng, 2 * f, hidden, f);
    p.cross_I = random_net(rng, 2 * f, hidden, f);
    return p;
}

ModalityFeatures random_features(std::mt19937_64& rng, int f) {
    return {random_vec(rng, f), random_vec(rng, f), random_vec(rng, f)};
}

// independent recomputation of one mask net
Eigen::VectorXd oracle_mask(const Eigen::VectorXd& x, const MaskNet& n) {
    Eigen::VectorXd h = (n.W1 * x + n.b1).unaryExpr([](double v) { return encoders::leaky_relu(v); });
    Eigen::VectorXd pre = n.W2 * h + n.b2;
    return pre.unaryExpr([](double v) { return sigmoid(v); });
}

}  // namespace

TEST_CASE("self_mask of a zero net is exactly one half") {
    auto n = zero_net(4, 5, 4);
    auto m = self_mask(Eigen::VectorXd::Ones(4), n);
    REQUIRE(m.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(m[i] == 0.5);
}

TEST_CASE("self_mask saturates with large biases") {
    auto n = zero_net(3, 2, 3);
    n.b2 = Eigen::VectorXd::Constant(3, 25.0);
    auto hi = self_mask(Eigen::VectorXd::Zero(3), n);
    n.b2 = Eigen::VectorXd::Constant(3, -25.0);
    auto lo = self_mask(Eigen::VectorXd::Zero(3), n);
    for (int i = 0; i < 3; ++i) {
        CHECK(hi[i] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(lo[i] == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(hi[i] < 1.0);  // open interval
        CHECK(lo[i] > 0.0);
    }
}

TEST_CASE("self_mask matches the layerwise oracle") {
    auto rng = named_stream(41, "fusion/oracle");
    auto n = random_net(rng, 5, 7, 5);
    auto x = random_vec(rng, 5);
    CHECK((self_mask(x, n) - oracle_mask(x, n)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("apply_self is elementwise") {
    Eigen::VectorXd z(3), m(3);
    z << 2, -4, 6;
    m << 0.5, 0.25, 0.0;
    Eigen::VectorXd out = apply_self(z, m);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == -1.0);
    CHECK(out[2] == 0.0);
}

TEST_CASE("cross_mask concatenates its two inputs in order") {
    auto rng = named_stream(42, "fusion/cat");
    auto n = random_net(rng, 6, 4, 3);
    auto a = random_vec(rng, 3);
    auto b = random_vec(rng, 3);
    Eigen::VectorXd cat(6);
    cat << a, b;
    CHECK((cross_mask(a, b, n) - oracle_mask(cat, n)).cwiseAbs().maxCoeff() == 0.0);
    // order matters
    CHECK((cross_mask(a, b, n) - cross_mask(b, a, n)).norm() > 1e-8);
}

TEST_CASE("fuse matches a from-scratch composition bit for bit") {
    auto rng = named_stream(43, "fusion/compose");
    const int f = 6;
    auto p = random_fusion(rng, f, 9);
    auto m = random_features(rng, f);

    FusionDiagnostics diag;
    auto fused = fuse(m, p, &diag);
    REQUIRE(fused.size() == 3 * f);

    Eigen::VectorXd sM = oracle_mask(m.z_M, p.self_M);
    Eigen::VectorXd sV = oracle_mask(m.z_V, p.self_V);
    Eigen::VectorXd sI = oracle_mask(m.z_I, p.self_I);
    Eigen::VectorXd tM = m.z_M.cwiseProduct(sM);
    Eigen::VectorXd tV = m.z_V.cwiseProduct(sV);
    Eigen::VectorXd tI = m.z_I.cwiseProduct(sI);
    Eigen::VectorXd catM(2 * f), catI(2 * f), catV(2 * f);
    catM << tV, tI;  // V + I gate the radar branch
    catI << tM, tV;  // M + V gate the inertial branch
    catV << tM, tI;  // M + I gate the visual branch
    Eigen::VectorXd cM = oracle_mask(catM, p.cross_M);
    Eigen::VectorXd cI = oracle_mask(catI, p.cross_I);
    Eigen::VectorXd cV = oracle_mask(catV, p.cross_V);
    Eigen::VectorXd expect(3 * f);
    expect << tI.cwiseProduct(cI), tM.cwiseProduct(cM), tV.cwiseProduct(cV);

    CHECK((fused - expect).cwiseAbs().maxCoeff() == 0.0);
    CHECK((diag.self_M - sM).norm() == 0.0);
    CHECK((diag.cross_V - cV).norm() == 0.0);
}

TEST_CASE("fuse with cross_from_raw reads raw features") {
    auto rng = named_stream(44, "fusion/raw");
    const int f = 4;
    auto p = random_fusion(rng, f, 5);
    p.cross_from_raw = true;
    auto m = random_features(rng, f);

    auto fused = fuse(m, p);
    Eigen::VectorXd sI = oracle_mask(m.z_I, p.self_I);
    Eigen::VectorXd catI(2 * f);
    catI << m.z_M, m.z_V;
    Eigen::VectorXd cI = oracle_mask(catI, p.cross_I);
    Eigen::VectorXd head = m.z_I.cwiseProduct(sI).cwiseProduct(cI);
    CHECK((fused.head(f) - head).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fused vector segments zero out with their modality") {
    auto rng = named_stream(45, "fusion/zero");
    const int f = 5;
    auto p = random_fusion(rng, f, 6);
    auto m = random_features(rng, f);
    m.z_M.setZero();
    auto fused = fuse(m, p);
    // radar occupies the middle segment of [I; M; V]
    CHECK(fused.segment(f, f).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fused.head(f).cwiseAbs().maxCoeff() > 0.0);
    CHECK(fused.tail(f).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("masks stay inside (0,1) and gating shrinks magnitudes") {
    auto rng = named_stream(46, "fusion/bounds");
    const int f = 8;
    auto p = random_fusion(rng, f, 8);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_features(rng, f);
        FusionDiagnostics diag;
        auto fused = fuse(m, p, &diag);
        for (const auto* mask :
             {&diag.self_M, &diag.self_V, &diag.self_I, &diag.cross_M, &diag.cross_V,
              &diag.cross_I}) {
            CHECK(mask->minCoeff() > 0.0);
            CHECK(mask->maxCoeff() < 1.0);
        }
        // every fused coordinate is bounded by its raw feature magnitude
        Eigen::VectorXd raw(3 * f);
        raw << m.z_I, m.z_M, m.z_V;
        for (int i = 0; i < 3 * f; ++i) CHECK(std::abs(fused[i]) <= std::abs(raw[i]));
    }
}

TEST_CASE("fuse_backward matches finite differences") {
    auto rng = named_stream(47, "fusion/fd");
    const int f = 4;
    auto p = random_fusion(rng, f, 5);
    auto m = random_features(rng, f);
    Eigen::VectorXd g_fused = random_vec(rng, 3 * f);

    for (bool raw : {false, true}) {
        p.cross_from_raw = raw;
        FuseCache cache;
        fuse(m, p, nullptr, &cache);
        auto grads = FusionGrads::zero(p);
        auto g_in = fuse_backward(g_fused, cache, p, grads);

        const double h = 1e-6;
        auto loss = [&](const FusionParams& pp, const ModalityFeatures& mm) {
            return g_fused.dot(fuse(mm, pp));
        };
        // input gradients
        for (int i = 0; i < f; ++i) {
            ModalityFeatures mp = m, mm2 = m;
            mp.z_M[i] += h;
            mm2.z_M[i] -= h;
            CHECK(g_in.z_M[i] ==
                  doctest::Approx((loss(p, mp) - loss(p, mm2)) / (2 * h)).epsilon(1e-5));
            mp = m;
            mm2 = m;
            mp.z_I[i] += h;
            mm2.z_I[i] -= h;
            CHECK(g_in.z_I[i] ==
                  doctest::Approx((loss(p, mp) - loss(p, mm2)) / (2 * h)).epsilon(1e-5));
        }
        // a sample of parameter gradients from each net
        struct Slot {
            double* param;
            double grad;
        };
        std::vector<Slot> slots = {
            {&p.self_M.W1(1, 2), grads.self_M.dW1(1, 2)},
            {&p.self_V.b2[0], grads.self_V.db2[0]},
            {&p.self_I.W2(0, 3), grads.self_I.dW2(0, 3)},
            {&p.cross_M.W1(2, 5), grads.cross_M.dW1(2, 5)},
            {&p.cross_I.b1[1], grads.cross_I.db1[1]},
            {&p.cross_V.W2(3, 4), grads.cross_V.dW2(3, 4)},
        };
        for (auto& s : slots) {
            const double keep = *s.param;
            *s.param = keep + h;
            const double up = loss(p, m);
            *s.param = keep - h;
            const double dn = loss(p, m);
            *s.param = keep;
            CHECK(s.grad == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-5));
        }
    }
}

TEST_CASE("fuse_baseline single-stage composition") {
    auto rng = named_stream(48, "fusion/baseline");
    const int f = 4;
    BaselineParams p;
    p.mask_M = random_net(rng, 3 * f, 6, f);
    p.mask_V = random_net(rng, 3 * f, 6, f);
    p.mask_I = random_net(rng, 3 * f, 6, f);
    auto m = random_features(rng, f);

    FusionDiagnostics diag;
    auto fused = fuse_baseline(m, p, &diag);
    Eigen::VectorXd cat(3 * f);
    cat << m.z_I, m.z_M, m.z_V;
    Eigen::VectorXd mI = oracle_mask(cat, p.mask_I);
    Eigen::VectorXd mM = oracle_mask(cat, p.mask_M);
    Eigen::VectorXd mV = oracle_mask(cat, p.mask_V);
    Eigen::VectorXd expect(3 * f);
    expect << m.z_I.cwiseProduct(mI), m.z_M.cwiseProduct(mM), m.z_V.cwiseProduct(mV);
    CHECK((fused - expect).cwiseAbs().maxCoeff() == 0.0);
    CHECK((diag.self_I - mI).norm() == 0.0);
    // cross diagnostics are neutral in baseline mode
    CHECK((diag.cross_M - Eigen::VectorXd::Ones(f)).norm() == 0.0);
}

TEST_CASE("fuse_baseline_backward matches finite differences") {
    auto rng = named_stream(49, "fusion/basefd");
    const int f = 3;
    BaselineParams p;
    p.mask_M = random_net(rng, 3 * f, 4, f);
    p.mask_V = random_net(rng, 3 * f, 4, f);
    p.mask_I = random_net(rng, 3 * f, 4, f);
    auto m = random_features(rng, f);
    Eigen::VectorXd g_fused = random_vec(rng, 3 * f);

    BaselineCache cache;
    fuse_baseline(m, p, nullptr, &cache);
    auto grads = BaselineGrads::zero(p);
    auto g_in = fuse_baseline_backward(g_fused, cache, p, grads);

    const double h = 1e-6;
    auto loss = [&](const BaselineParams& pp, const ModalityFeatures& mm) {
        return g_fused.dot(fuse_baseline(mm, pp));
    };
    for (int i = 0; i < f; ++i) {
        ModalityFeatures mp = m, mm2 = m;
        mp.z_V[i] += h;
        mm2.z_V[i] -= h;
        CHECK(g_in.z_V[i] == doctest::Approx((loss(p, mp) - loss(p, mm2)) / (2 * h)).epsilon(1e-5));
    }
    const double keep = p.mask_M.W1(2, 4);
    p.mask_M.W1(2, 4) = keep + h;
    const double up = loss(p, m);
    p.mask_M.W1(2, 4) = keep - h;
    const double dn = loss(p, m);
    p.mask_M.W1(2, 4) = keep;
    CHECK(grads.mask_M.dW1(2, 4) == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-5));
}
