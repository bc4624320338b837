#include "raci/fusion.hpp"

#include "raci/encoders.hpp"

#include <cmath>
#include <stdexcept>

namespace raci::fusion {

namespace {

using encoders::leaky_relu;
using encoders::leaky_relu_grad;

Eigen::VectorXd mask_forward(const Eigen::VectorXd& input, const MaskNet& net, MaskCache* cache) {
    if (net.W1.cols() != input.size() || net.W1.rows() != net.b1.size() ||
        net.W2.cols() != net.W1.rows() || net.W2.rows() != net.b2.size()) {
        throw std::invalid_argument("fusion mask: parameter shape mismatch");
    }
    Eigen::VectorXd pre1 = net.W1 * input + net.b1;
    Eigen::VectorXd hidden = pre1.unaryExpr([](double v) { return leaky_relu(v); });
    Eigen::VectorXd pre2 = net.W2 * hidden + net.b2;
    Eigen::VectorXd mask = pre2.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    if (cache) {
        cache->input = input;
        cache->pre1 = pre1;
        cache->hidden = hidden;
        cache->pre2 = pre2;
        cache->mask = mask;
    }
    return mask;
}

Eigen::VectorXd concat2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out(a.size() + b.size());
    out << a, b;
    return out;
}

}  // namespace

MaskGrads MaskGrads::zero(const MaskNet& n) {
    return {Eigen::MatrixXd::Zero(n.W1.rows(), n.W1.cols()), Eigen::VectorXd::Zero(n.b1.size()),
            Eigen::MatrixXd::Zero(n.W2.rows(), n.W2.cols()), Eigen::VectorXd::Zero(n.b2.size())};
}

Eigen::VectorXd self_mask(const Eigen::VectorXd& z, const MaskNet& net, MaskCache* cache) {
    return mask_forward(z, net, cache);
}

Eigen::VectorXd apply_self(const Eigen::VectorXd& z, const Eigen::VectorXd& mask) {
    if (z.size() != mask.size()) throw std::invalid_argument("apply_self: length mismatch");
    return z.array() * mask.array();
}

Eigen::VectorXd cross_mask(const Eigen::VectorXd& other1, const Eigen::VectorXd& other2,
                           const MaskNet& net, MaskCache* cache) {
    return mask_forward(concat2(other1, other2), net, cache);
}

Eigen::VectorXd mask_backward(const Eigen::VectorXd& g_mask, const MaskCache& cache,
                              const MaskNet& net, MaskGrads& grads) {
    Eigen::VectorXd g_pre2 =
        g_mask.array() * cache.mask.array() * (1.0 - cache.mask.array());
    grads.dW2.noalias() += g_pre2 * cache.hidden.transpose();
    grads.db2 += g_pre2;
    Eigen::VectorXd g_hidden = net.W2.transpose() * g_pre2;
    Eigen::VectorXd g_pre1 =
        g_hidden.array() *
        cache.pre1.unaryExpr([](double v) { return leaky_relu_grad(v); }).array();
    grads.dW1.noalias() += g_pre1 * cache.input.transpose();
    grads.db1 += g_pre1;
    return net.W1.transpose() * g_pre1;
}

Eigen::VectorXd fuse(const ModalityFeatures& m, const FusionParams& params,
                     FusionDiagnostics* diag, FuseCache* cache) {
    FuseCache local;
    FuseCache& c = cache ? *cache : local;
    c.z = m;

    Eigen::VectorXd a_M = self_mask(m.z_M, params.self_M, &c.self_M);
    Eigen::VectorXd a_V = self_mask(m.z_V, params.self_V, &c.self_V);
    Eigen::VectorXd a_I = self_mask(m.z_I, params.self_I, &c.self_I);
    c.zt_M = apply_self(m.z_M, a_M);
    c.zt_V = apply_self(m.z_V, a_V);
    c.zt_I = apply_self(m.z_I, a_I);

    const Eigen::VectorXd& in_M = params.cross_from_raw ? m.z_M : c.zt_M;
    const Eigen::VectorXd& in_V = params.cross_from_raw ? m.z_V : c.zt_V;
    const Eigen::VectorXd& in_I = params.cross_from_raw ? m.z_I : c.zt_I;

    // Cross input order: V+I for M, M+V for I, M+I for V.
    Eigen::VectorXd x_M = cross_mask(in_V, in_I, params.cross_M, &c.cross_M);
    Eigen::VectorXd x_I = cross_mask(in_M, in_V, params.cross_I, &c.cross_I);
    Eigen::VectorXd x_V = cross_mask(in_M, in_I, params.cross_V, &c.cross_V);

    if (diag) {
        diag->self_M = a_M;
        diag->self_V = a_V;
        diag->self_I = a_I;
        diag->cross_M = x_M;
        diag->cross_V = x_V;
        diag->cross_I = x_I;
    }

    Eigen::VectorXd fused(m.z_I.size() + m.z_M.size() + m.z_V.size());
    fused << x_I.array() * c.zt_I.array(), x_M.array() * c.zt_M.array(),
             x_V.array() * c.zt_V.array();
    return fused;
}

FusionGrads FusionGrads::zero(const FusionParams& p) {
    return {MaskGrads::zero(p.self_M), MaskGrads::zero(p.self_V), MaskGrads::zero(p.self_I),
            MaskGrads::zero(p.cross_M), MaskGrads::zero(p.cross_V), MaskGrads::zero(p.cross_I)};
}

ModalityFeatures fuse_backward(const Eigen::VectorXd& g_fused, const FuseCache& cache,
                               const FusionParams& params, FusionGrads& grads) {
    const auto fI = cache.z.z_I.size();
    const auto fM = cache.z.z_M.size();
    const auto fV = cache.z.z_V.size();
    Eigen::VectorXd g_I = g_fused.segment(0, fI);
    Eigen::VectorXd g_M = g_fused.segment(fI, fM);
    Eigen::VectorXd g_V = g_fused.segment(fI + fM, fV);

    // Gradients into the self-stage outputs, via both the direct gating
    // path and the cross-mask inputs (unless the cross stage reads raw z).
    Eigen::VectorXd g_zt_M = g_M.array() * cache.cross_M.mask.array();
    Eigen::VectorXd g_zt_I = g_I.array() * cache.cross_I.mask.array();
    Eigen::VectorXd g_zt_V = g_V.array() * cache.cross_V.mask.array();
    ModalityFeatures g_raw{Eigen::VectorXd::Zero(fM), Eigen::VectorXd::Zero(fV),
                           Eigen::VectorXd::Zero(fI)};

    auto route = [&](const Eigen::VectorXd& g_in, Eigen::VectorXd& zt_slot,
                     Eigen::VectorXd& raw_slot) {
        if (params.cross_from_raw) {
            raw_slot += g_in;
        } else {
            zt_slot += g_in;
        }
    };

    Eigen::VectorXd g_xin;
    g_xin = mask_backward(Eigen::VectorXd(g_M.array() * cache.zt_M.array()), cache.cross_M,
                          params.cross_M, grads.cross_M);
    route(g_xin.segment(0, fV), g_zt_V, g_raw.z_V);
    route(g_xin.segment(fV, fI), g_zt_I, g_raw.z_I);

    g_xin = mask_backward(Eigen::VectorXd(g_I.array() * cache.zt_I.array()), cache.cross_I,
                          params.cross_I, grads.cross_I);
    route(g_xin.segment(0, fM), g_zt_M, g_raw.z_M);
    route(g_xin.segment(fM, fV), g_zt_V, g_raw.z_V);

    g_xin = mask_backward(Eigen::VectorXd(g_V.array() * cache.zt_V.array()), cache.cross_V,
                          params.cross_V, grads.cross_V);
    route(g_xin.segment(0, fM), g_zt_M, g_raw.z_M);
    route(g_xin.segment(fM, fI), g_zt_I, g_raw.z_I);

    // Self stage: zt = mask(z) . z.
    auto self_back = [&](const Eigen::VectorXd& g_zt, const Eigen::VectorXd& z,
                         const MaskCache& mc, const MaskNet& net, MaskGrads& mg) {
        Eigen::VectorXd g_mask = g_zt.array() * z.array();
        Eigen::VectorXd g_z = g_zt.array() * mc.mask.array();
        g_z += mask_backward(g_mask, mc, net, mg);
        return g_z;
    };
    g_raw.z_M += self_back(g_zt_M, cache.z.z_M, cache.self_M, params.self_M, grads.self_M);
    g_raw.z_V += self_back(g_zt_V, cache.z.z_V, cache.self_V, params.self_V, grads.self_V);
    g_raw.z_I += self_back(g_zt_I, cache.z.z_I, cache.self_I, params.self_I, grads.self_I);
    return g_raw;
}

Eigen::VectorXd fuse_baseline(const ModalityFeatures& m, const BaselineParams& params,
                              FusionDiagnostics* diag, BaselineCache* cache) {
    BaselineCache local;
    BaselineCache& c = cache ? *cache : local;
    c.z = m;
    c.cat.resize(m.z_I.size() + m.z_M.size() + m.z_V.size());
    c.cat << m.z_I, m.z_M, m.z_V;

    Eigen::VectorXd a_M = mask_forward(c.cat, params.mask_M, &c.mask_M);
    Eigen::VectorXd a_V = mask_forward(c.cat, params.mask_V, &c.mask_V);
    Eigen::VectorXd a_I = mask_forward(c.cat, params.mask_I, &c.mask_I);

    if (diag) {
        diag->self_M = a_M;
        diag->self_V = a_V;
        diag->self_I = a_I;
        diag->cross_M = Eigen::VectorXd::Ones(a_M.size());
        diag->cross_V = Eigen::VectorXd::Ones(a_V.size());
        diag->cross_I = Eigen::VectorXd::Ones(a_I.size());
    }

    Eigen::VectorXd fused(c.cat.size());
    fused << a_I.array() * m.z_I.array(), a_M.array() * m.z_M.array(),
             a_V.array() * m.z_V.array();
    return fused;
}

BaselineGrads BaselineGrads::zero(const BaselineParams& p) {
    return {MaskGrads::zero(p.mask_M), MaskGrads::zero(p.mask_V), MaskGrads::zero(p.mask_I)};
}

ModalityFeatures fuse_baseline_backward(const Eigen::VectorXd& g_fused, const BaselineCache& cache,
                                        const BaselineParams& params, BaselineGrads& grads) {
    const auto fI = cache.z.z_I.size();
    const auto fM = cache.z.z_M.size();
    const auto fV = cache.z.z_V.size();
    Eigen::VectorXd g_I = g_fused.segment(0, fI);
    Eigen::VectorXd g_M = g_fused.segment(fI, fM);
    Eigen::VectorXd g_V = g_fused.segment(fI + fM, fV);

    Eigen::VectorXd g_cat = Eigen::VectorXd::Zero(cache.cat.size());
    g_cat += mask_backward(Eigen::VectorXd(g_M.array() * cache.z.z_M.array()), cache.mask_M,
                           params.mask_M, grads.mask_M);
    g_cat += mask_backward(Eigen::VectorXd(g_V.array() * cache.z.z_V.array()), cache.mask_V,
                           params.mask_V, grads.mask_V);
    g_cat += mask_backward(Eigen::VectorXd(g_I.array() * cache.z.z_I.array()), cache.mask_I,
                           params.mask_I, grads.mask_I);

    ModalityFeatures g_raw;
    g_raw.z_I = Eigen::VectorXd(g_I.array() * cache.mask_I.mask.array()) + g_cat.segment(0, fI);
    g_raw.z_M = Eigen::VectorXd(g_M.array() * cache.mask_M.mask.array()) + g_cat.segment(fI, fM);
    g_raw.z_V =
        Eigen::VectorXd(g_V.array() * cache.mask_V.mask.array()) + g_cat.segment(fI + fM, fV);
    return g_raw;
}

}  // namespace raci::fusion
