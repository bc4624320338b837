#pragma once

#include <Eigen/Core>
#include <vector>

namespace raci::encoders {

inline constexpr int kImuSamples = 48;
inline constexpr double kLeakySlope = 0.01;

inline double leaky_relu(double x) { return x > 0.0 ? x : kLeakySlope * x; }
inline double leaky_relu_grad(double x) { return x > 0.0 ? 1.0 : kLeakySlope; }

/// Gate weights in block order [input; forget; cell; output] over the rows.
struct LstmParams {
    Eigen::MatrixXd Wx;  // 4H x input
    Eigen::MatrixXd Wh;  // 4H x H
    Eigen::VectorXd b;   // 4H

    Eigen::Index hidden() const { return Wh.cols(); }
    Eigen::Index input() const { return Wx.cols(); }
};

struct LstmState {
    Eigen::VectorXd h;
    Eigen::VectorXd c;

    static LstmState zero(Eigen::Index hidden) {
        return {Eigen::VectorXd::Zero(hidden), Eigen::VectorXd::Zero(hidden)};
    }
};

/// Everything the backward pass needs from one step.
struct LstmStepCache {
    Eigen::VectorXd x, h_prev, c_prev;
    Eigen::VectorXd i, f, g, o;  // post-activation gates
    Eigen::VectorXd c, tanh_c;
};

struct LstmGrads {
    Eigen::MatrixXd dWx, dWh;
    Eigen::VectorXd db;

    static LstmGrads zero(const LstmParams& p) {
        return {Eigen::MatrixXd::Zero(p.Wx.rows(), p.Wx.cols()),
                Eigen::MatrixXd::Zero(p.Wh.rows(), p.Wh.cols()),
                Eigen::VectorXd::Zero(p.b.size())};
    }
};

/// c_t = f.c_prev + i.g, h_t = o.tanh(c_t) with sigmoid i/f/o and tanh g.
LstmState lstm_step(const Eigen::VectorXd& x, const LstmState& prev, const LstmParams& params,
                    LstmStepCache* cache = nullptr);

/// Accumulates parameter gradients into grads; returns gradients w.r.t.
/// (x, h_prev, c_prev) given upstream (g_h, g_c).
struct LstmStepInputGrads {
    Eigen::VectorXd g_x, g_h_prev, g_c_prev;
};
LstmStepInputGrads lstm_step_backward(const Eigen::VectorXd& g_h, const Eigen::VectorXd& g_c,
                                      const LstmStepCache& cache, const LstmParams& params,
                                      LstmGrads& grads);

/// 48 x 6 IMU window: columns (ax, ay, az, gx, gy, gz).
using ImuWindow = Eigen::Matrix<double, kImuSamples, 6>;

/// Runs the unidirectional LSTM over the rows in time order from zero
/// state; z_I is the final hidden state.
Eigen::VectorXd imu_encode(const ImuWindow& window, const LstmParams& params,
                           std::vector<LstmStepCache>* tape = nullptr);

/// Backward through the full 48-step unroll given dL/dz_I.
void imu_encode_backward(const Eigen::VectorXd& g_z, const std::vector<LstmStepCache>& tape,
                         const LstmParams& params, LstmGrads& grads);

/// Two grayscale images (values in [0,1]) flattened row-major to H*W.
struct ImagePair {
    Eigen::VectorXd img0, img1;
    int height = 0, width = 0;
};

struct VisualCache {
    Eigen::VectorXd diff;    // img1 - img0
    Eigen::VectorXd preact;  // W*diff + b
};

/// z_V = LeakyReLU(W*(img1 - img0) + b): difference image standing in for
/// the optical-flow front end, then the final FC layer.
Eigen::VectorXd visual_encode(const ImagePair& pair, const Eigen::MatrixXd& W,
                              const Eigen::VectorXd& b, VisualCache* cache = nullptr);

struct VisualGrads {
    Eigen::MatrixXd dW;
    Eigen::VectorXd db;
};
VisualGrads visual_encode_backward(const Eigen::VectorXd& g_z, const VisualCache& cache,
                                   const Eigen::MatrixXd& W);

}  // namespace raci::encoders
