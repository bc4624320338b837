#pragma once

#include <Eigen/Core>

namespace raci::fusion {

/// Latent features from the three branches.
struct ModalityFeatures {
    Eigen::VectorXd z_M, z_V, z_I;
};

/// Two FC layers implementing sigmoid(fc2(LeakyReLU(fc1(x)))).
struct MaskNet {
    Eigen::MatrixXd W1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd W2;
    Eigen::VectorXd b2;
};

struct MaskCache {
    Eigen::VectorXd input, pre1, hidden, pre2, mask;
};

struct MaskGrads {
    Eigen::MatrixXd dW1;
    Eigen::VectorXd db1;
    Eigen::MatrixXd dW2;
    Eigen::VectorXd db2;

    static MaskGrads zero(const MaskNet& n);
};

/// Sigmoid attention mask from a modality's own features; values in (0,1).
Eigen::VectorXd self_mask(const Eigen::VectorXd& z, const MaskNet& net,
                          MaskCache* cache = nullptr);

/// Elementwise gating.
Eigen::VectorXd apply_self(const Eigen::VectorXd& z, const Eigen::VectorXd& mask);

/// Mask for one modality from the concatenation of the two others, in the
/// fixed order given by the caller (V+I for M, M+V for I, M+I for V).
Eigen::VectorXd cross_mask(const Eigen::VectorXd& other1, const Eigen::VectorXd& other2,
                           const MaskNet& net, MaskCache* cache = nullptr);

/// Accumulates parameter grads; returns gradient w.r.t. the net input.
Eigen::VectorXd mask_backward(const Eigen::VectorXd& g_mask, const MaskCache& cache,
                              const MaskNet& net, MaskGrads& grads);

struct FusionParams {
    MaskNet self_M, self_V, self_I;
    MaskNet cross_M, cross_V, cross_I;
    /// When true the cross stage reads raw branch features instead of the
    /// self-stage outputs (the literal reading of the cross-mask formula).
    bool cross_from_raw = false;
};

struct FusionDiagnostics {
    Eigen::VectorXd self_M, self_V, self_I;    // first-stage masks
    Eigen::VectorXd cross_M, cross_V, cross_I; // second-stage masks
};

struct FuseCache {
    ModalityFeatures z;
    MaskCache self_M, self_V, self_I;
    MaskCache cross_M, cross_V, cross_I;
    Eigen::VectorXd zt_M, zt_V, zt_I;  // self-stage outputs
};

/// Two-stage fusion: self masks, elementwise gating, cross masks from the
/// other two modalities, gating again, then concatenation [I; M; V].
Eigen::VectorXd fuse(const ModalityFeatures& m, const FusionParams& params,
                     FusionDiagnostics* diag = nullptr, FuseCache* cache = nullptr);

struct FusionGrads {
    MaskGrads self_M, self_V, self_I;
    MaskGrads cross_M, cross_V, cross_I;

    static FusionGrads zero(const FusionParams& p);
};

/// Returns gradients w.r.t. the raw modality features.
ModalityFeatures fuse_backward(const Eigen::VectorXd& g_fused, const FuseCache& cache,
                               const FusionParams& params, FusionGrads& grads);

struct BaselineParams {
    MaskNet mask_M, mask_V, mask_I;  // each reads [z_I; z_M; z_V]
};

struct BaselineCache {
    ModalityFeatures z;
    Eigen::VectorXd cat;
    MaskCache mask_M, mask_V, mask_I;
};

/// Single-stage soft-fusion baseline: one sigmoid mask per modality from
/// the concatenation of all three raw features, then [I; M; V].
Eigen::VectorXd fuse_baseline(const ModalityFeatures& m, const BaselineParams& params,
                              FusionDiagnostics* diag = nullptr, BaselineCache* cache = nullptr);

struct BaselineGrads {
    MaskGrads mask_M, mask_V, mask_I;

    static BaselineGrads zero(const BaselineParams& p);
};

ModalityFeatures fuse_baseline_backward(const Eigen::VectorXd& g_fused, const BaselineCache& cache,
                                        const BaselineParams& params, BaselineGrads& grads);

}  // namespace raci::fusion
