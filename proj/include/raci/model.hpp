#pragma once

#include "raci/fusion.hpp"
#include "raci/head.hpp"
#include "raci/params.hpp"
#include "raci/scene.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace raci {

enum class FusionMode { TwoStage, Baseline, LiteralEq4 };

FusionMode fusion_mode_from_string(const std::string& s);
std::string to_string(FusionMode m);

struct ModelDims {
    int n_keypoints = 16;
    int descriptor_dim = 8;
    int f_m = 16;
    int f_v = 16;
    int f_i = 16;
    int hidden = 32;
    int image_h = 32;
    int image_w = 32;
    double match_temperature = 0.1;

    int fused_dim() const { return f_i + f_m + f_v; }
};

/// End-to-end pipeline: radar delta-matrix encoder, IMU LSTM, visual FC,
/// attention fusion, temporal LSTM, pose regression, weighted MSE.
class Model {
public:
    Model(const ModelDims& dims, FusionMode mode) : dims_(dims), mode_(mode) {}

    const ModelDims& dims() const { return dims_; }
    FusionMode mode() const { return mode_; }

    /// Builds the trainable tensor layout, initialized uniform in
    /// +-1/sqrt(fan-in) with the LSTM forget biases at 1.0.
    ParameterSet init_params(std::uint64_t seed) const;
    /// Same layout, all zeros (for gradients, moments, zero-model tests).
    ParameterSet zero_params() const;

    struct FrameTape {
        radar::DeltaMatrix delta;
        std::vector<encoders::LstmStepCache> imu_tape;
        encoders::VisualCache vis_cache;
        fusion::FuseCache fuse_cache;
        fusion::BaselineCache base_cache;
        fusion::FusionDiagnostics masks;
        encoders::LstmStepCache head_cache;
        head::RegressCache reg_cache;
        geom::RelativePose pred, gt;
        double loss = 0.0;
    };

    struct WindowTape {
        std::vector<FrameTape> frames;
        encoders::LstmState state_in, state_out;
        double loss_sum = 0.0;  // sum over frames of weighted_mse
    };

    /// Runs the pipeline over consecutive frames carrying the temporal
    /// LSTM state. Throws numerical_error naming the stage on any
    /// non-finite activation.
    WindowTape forward_window(const std::vector<const EstimationFrame*>& frames,
                              const ParameterSet& params, const encoders::LstmState& state_in,
                              const head::PoseWeights& weights) const;

    /// Gradients of the window's summed loss, accumulated into grads
    /// (layout from zero_params). Untouched tensors keep zero gradient.
    void backward_window(const WindowTape& tape, const ParameterSet& params,
                         const head::PoseWeights& weights, ParameterSet& grads) const;

    /// Single frame convenience used by evaluation and mask export.
    struct FrameResult {
        geom::RelativePose pred;
        fusion::FusionDiagnostics masks;
        encoders::LstmState state;
        double loss = 0.0;
    };
    FrameResult forward_frame(const EstimationFrame& frame, const ParameterSet& params,
                              const encoders::LstmState& state_in,
                              const head::PoseWeights& weights) const;

    encoders::LstmState initial_state() const {
        return encoders::LstmState::zero(dims_.hidden);
    }

    void validate_frame(const EstimationFrame& frame) const;  // throws data_error

private:
    ModelDims dims_;
    FusionMode mode_;
};

}  // namespace raci
