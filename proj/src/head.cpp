#include "raci/head.hpp"

#include "raci/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace raci::head {

using encoders::leaky_relu;
using encoders::leaky_relu_grad;

PoseWeights default_pose_weights() {
    PoseWeights w;
    w.w << 10.34, 0.33, 56.09, 178.05, 227.27, 39.05;
    w.lambda = 1.0;
    return w;
}

PoseWeights compute_pose_weights(const geom::Vector6d& means, const geom::Vector6d& stds,
                                 double lambda) {
    PoseWeights out;
    out.lambda = lambda;
    for (int i = 0; i < 6; ++i) {
        const double denom = std::abs(means[i]) + lambda * stds[i];
        if (!(denom > 0.0)) {
            throw config_error(
                "compute_pose_weights: |mean| + lambda*std is zero for component " +
                std::to_string(i) + "; set an explicit floor weight in the config");
        }
        out.w[i] = 1.0 / denom;
    }
    return out;
}

double weighted_mse(const geom::RelativePose& pred, const geom::RelativePose& truth,
                    const PoseWeights& w) {
    geom::Vector6d e = pred.vec() - truth.vec();
    return (w.w.array() * e.array().square()).sum();
}

geom::Vector6d weighted_mse_grad(const geom::RelativePose& pred, const geom::RelativePose& truth,
                                 const PoseWeights& w) {
    geom::Vector6d e = pred.vec() - truth.vec();
    return 2.0 * (w.w.array() * e.array()).matrix();
}

encoders::LstmState temporal_step(const Eigen::VectorXd& fused, const encoders::LstmState& state,
                                  const encoders::LstmParams& params,
                                  encoders::LstmStepCache* cache) {
    return encoders::lstm_step(fused, state, params, cache);
}

geom::RelativePose pose_regress(const Eigen::VectorXd& h, const HeadParams& params,
                                RegressCache* cache) {
    if (params.W1.cols() != h.size() || params.W2.cols() != params.W1.rows() ||
        params.W2.rows() != 6) {
        throw std::invalid_argument("pose_regress: shape mismatch");
    }
    Eigen::VectorXd pre1 = params.W1 * h + params.b1;
    Eigen::VectorXd a1 = pre1.unaryExpr([](double v) { return leaky_relu(v); });
    geom::Vector6d out = params.W2 * a1 + params.b2;
    if (cache) {
        cache->h = h;
        cache->pre1 = pre1;
        cache->a1 = a1;
    }
    return geom::RelativePose::from_vec(out);
}

RegressGrads RegressGrads::zero(const HeadParams& p) {
    return {Eigen::MatrixXd::Zero(p.W1.rows(), p.W1.cols()), Eigen::VectorXd::Zero(p.b1.size()),
            Eigen::MatrixXd::Zero(p.W2.rows(), p.W2.cols()), Eigen::VectorXd::Zero(p.b2.size())};
}

Eigen::VectorXd pose_regress_backward(const geom::Vector6d& g_pose, const RegressCache& cache,
                                      const HeadParams& params, RegressGrads& grads) {
    grads.dW2.noalias() += g_pose * cache.a1.transpose();
    grads.db2 += g_pose;
    Eigen::VectorXd g_a1 = params.W2.transpose() * g_pose;
    Eigen::VectorXd g_pre1 =
        g_a1.array() * cache.pre1.unaryExpr([](double v) { return leaky_relu_grad(v); }).array();
    grads.dW1.noalias() += g_pre1 * cache.h.transpose();
    grads.db1 += g_pre1;
    return params.W1.transpose() * g_pre1;
}

}  // namespace raci::head
