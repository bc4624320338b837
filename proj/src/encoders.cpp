#include "raci/encoders.hpp"

#include <cmath>
#include <stdexcept>

namespace raci::encoders {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmState lstm_step(const Eigen::VectorXd& x, const LstmState& prev, const LstmParams& params,
                    LstmStepCache* cache) {
    const auto H = params.hidden();
    if (x.size() != params.input() || prev.h.size() != H || prev.c.size() != H ||
        params.Wx.rows() != 4 * H || params.b.size() != 4 * H) {
        throw std::invalid_argument("lstm_step: shape mismatch");
    }
    Eigen::VectorXd pre = params.Wx * x + params.Wh * prev.h + params.b;
    LstmState next;
    next.h.resize(H);
    next.c.resize(H);
    Eigen::VectorXd i(H), f(H), g(H), o(H), tanh_c(H);
    for (Eigen::Index k = 0; k < H; ++k) {
        i[k] = sigmoid(pre[k]);
        f[k] = sigmoid(pre[H + k]);
        g[k] = std::tanh(pre[2 * H + k]);
        o[k] = sigmoid(pre[3 * H + k]);
        next.c[k] = f[k] * prev.c[k] + i[k] * g[k];
        tanh_c[k] = std::tanh(next.c[k]);
        next.h[k] = o[k] * tanh_c[k];
    }
    if (cache) {
        cache->x = x;
        cache->h_prev = prev.h;
        cache->c_prev = prev.c;
        cache->i = i;
        cache->f = f;
        cache->g = g;
        cache->o = o;
        cache->c = next.c;
        cache->tanh_c = tanh_c;
    }
    return next;
}

LstmStepInputGrads lstm_step_backward(const Eigen::VectorXd& g_h, const Eigen::VectorXd& g_c,
                                      const LstmStepCache& cache, const LstmParams& params,
                                      LstmGrads& grads) {
    const auto H = params.hidden();
    // dL/dc through h = o*tanh(c) plus the carried cell gradient.
    Eigen::VectorXd dc = g_c.array() +
        g_h.array() * cache.o.array() * (1.0 - cache.tanh_c.array().square());
    Eigen::VectorXd do_ = g_h.array() * cache.tanh_c.array();
    Eigen::VectorXd di = dc.array() * cache.g.array();
    Eigen::VectorXd dg = dc.array() * cache.i.array();
    Eigen::VectorXd df = dc.array() * cache.c_prev.array();

    Eigen::VectorXd dpre(4 * H);
    dpre.segment(0, H) = di.array() * cache.i.array() * (1.0 - cache.i.array());
    dpre.segment(H, H) = df.array() * cache.f.array() * (1.0 - cache.f.array());
    dpre.segment(2 * H, H) = dg.array() * (1.0 - cache.g.array().square());
    dpre.segment(3 * H, H) = do_.array() * cache.o.array() * (1.0 - cache.o.array());

    grads.dWx.noalias() += dpre * cache.x.transpose();
    grads.dWh.noalias() += dpre * cache.h_prev.transpose();
    grads.db += dpre;

    LstmStepInputGrads in;
    in.g_x = params.Wx.transpose() * dpre;
    in.g_h_prev = params.Wh.transpose() * dpre;
    in.g_c_prev = dc.array() * cache.f.array();
    return in;
}

Eigen::VectorXd imu_encode(const ImuWindow& window, const LstmParams& params,
                           std::vector<LstmStepCache>* tape) {
    if (params.input() != 6) throw std::invalid_argument("imu_encode: LSTM input dim must be 6");
    LstmState state = LstmState::zero(params.hidden());
    if (tape) tape->resize(kImuSamples);
    for (int t = 0; t < kImuSamples; ++t) {
        state = lstm_step(window.row(t).transpose(), state, params,
                          tape ? &(*tape)[t] : nullptr);
    }
    return state.h;
}

void imu_encode_backward(const Eigen::VectorXd& g_z, const std::vector<LstmStepCache>& tape,
                         const LstmParams& params, LstmGrads& grads) {
    Eigen::VectorXd g_h = g_z;
    Eigen::VectorXd g_c = Eigen::VectorXd::Zero(params.hidden());
    for (int t = kImuSamples - 1; t >= 0; --t) {
        auto in = lstm_step_backward(g_h, g_c, tape[t], params, grads);
        g_h = in.g_h_prev;
        g_c = in.g_c_prev;
    }
}

Eigen::VectorXd visual_encode(const ImagePair& pair, const Eigen::MatrixXd& W,
                              const Eigen::VectorXd& b, VisualCache* cache) {
    if (pair.img0.size() != pair.img1.size() || W.cols() != pair.img0.size() ||
        W.rows() != b.size()) {
        throw std::invalid_argument("visual_encode: shape mismatch");
    }
    Eigen::VectorXd diff = pair.img1 - pair.img0;
    Eigen::VectorXd pre = W * diff + b;
    if (cache) {
        cache->diff = diff;
        cache->preact = pre;
    }
    return pre.unaryExpr([](double v) { return leaky_relu(v); });
}

VisualGrads visual_encode_backward(const Eigen::VectorXd& g_z, const VisualCache& cache,
                                   const Eigen::MatrixXd& W) {
    (void)W;
    Eigen::VectorXd g_pre =
        g_z.array() * cache.preact.unaryExpr([](double v) { return leaky_relu_grad(v); }).array();
    VisualGrads out;
    out.dW = g_pre * cache.diff.transpose();
    out.db = g_pre;
    return out;
}

}  // namespace raci::encoders
