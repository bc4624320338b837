#pragma once

#include "raci/encoders.hpp"
#include "raci/geom.hpp"

#include <Eigen/Core>

namespace raci::head {

/// Per-component loss weights, w_i = 1/(|mean_i| + lambda*std_i).
struct PoseWeights {
    geom::Vector6d w = geom::Vector6d::Ones();
    double lambda = 1.0;
};

/// Weights computed by Boreas ground-truth statistics, shipped as the
/// default configuration so the published behavior is reproducible
/// without the dataset.
PoseWeights default_pose_weights();

PoseWeights compute_pose_weights(const geom::Vector6d& means, const geom::Vector6d& stds,
                                 double lambda);

/// Sum_i w_i * (pred_i - truth_i)^2.
double weighted_mse(const geom::RelativePose& pred, const geom::RelativePose& truth,
                    const PoseWeights& w);

/// dL/dpred for weighted_mse.
geom::Vector6d weighted_mse_grad(const geom::RelativePose& pred, const geom::RelativePose& truth,
                                 const PoseWeights& w);

/// Core LSTM over fused features plus two FC layers (LeakyReLU between,
/// final layer linear) mapping the hidden state to the 6-DoF estimate.
struct HeadParams {
    encoders::LstmParams lstm;
    Eigen::MatrixXd W1;  // H x H
    Eigen::VectorXd b1;
    Eigen::MatrixXd W2;  // 6 x H
    Eigen::VectorXd b2;
};

/// One temporal LSTM step; state is carried across consecutive frames
/// within a scene and reset to zero at scene start.
encoders::LstmState temporal_step(const Eigen::VectorXd& fused, const encoders::LstmState& state,
                                  const encoders::LstmParams& params,
                                  encoders::LstmStepCache* cache = nullptr);

struct RegressCache {
    Eigen::VectorXd h, pre1, a1;
};

geom::RelativePose pose_regress(const Eigen::VectorXd& h, const HeadParams& params,
                                RegressCache* cache = nullptr);

struct RegressGrads {
    Eigen::MatrixXd dW1;
    Eigen::VectorXd db1;
    Eigen::MatrixXd dW2;
    Eigen::VectorXd db2;

    static RegressGrads zero(const HeadParams& p);
};

/// Returns dL/dh.
Eigen::VectorXd pose_regress_backward(const geom::Vector6d& g_pose, const RegressCache& cache,
                                      const HeadParams& params, RegressGrads& grads);

}  // namespace raci::head
