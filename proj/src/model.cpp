#include "raci/model.hpp"

#include "raci/errors.hpp"
#include "raci/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace raci {

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

void check_stage(const Eigen::VectorXd& v, const char* stage, std::size_t frame) {
    if (!finite(v)) {
        throw numerical_error(std::string("non-finite activation in stage '") + stage +
                              "' at frame " + std::to_string(frame));
    }
}

fusion::MaskNet bind_masknet(const ParameterSet& p, const std::string& prefix) {
    return {p.at(prefix + ".W1"), p.at(prefix + ".b1"), p.at(prefix + ".W2"),
            p.at(prefix + ".b2")};
}

struct Typed {
    Eigen::MatrixXd radar_W;
    Eigen::VectorXd radar_b;
    Eigen::MatrixXd vis_W;
    Eigen::VectorXd vis_b;
    encoders::LstmParams imu;
    fusion::FusionParams fus;
    fusion::BaselineParams base;
    head::HeadParams hd;
};

Typed bind(const ParameterSet& p, FusionMode mode) {
    Typed t;
    t.radar_W = p.at("radar.fc.W");
    t.radar_b = p.at("radar.fc.b");
    t.vis_W = p.at("visual.fc.W");
    t.vis_b = p.at("visual.fc.b");
    t.imu = {p.at("imu.lstm.Wx"), p.at("imu.lstm.Wh"), p.at("imu.lstm.b")};
    if (mode == FusionMode::Baseline) {
        t.base.mask_M = bind_masknet(p, "fusion.base.M");
        t.base.mask_V = bind_masknet(p, "fusion.base.V");
        t.base.mask_I = bind_masknet(p, "fusion.base.I");
    } else {
        t.fus.self_M = bind_masknet(p, "fusion.self.M");
        t.fus.self_V = bind_masknet(p, "fusion.self.V");
        t.fus.self_I = bind_masknet(p, "fusion.self.I");
        t.fus.cross_M = bind_masknet(p, "fusion.cross.M");
        t.fus.cross_V = bind_masknet(p, "fusion.cross.V");
        t.fus.cross_I = bind_masknet(p, "fusion.cross.I");
        t.fus.cross_from_raw = (mode == FusionMode::LiteralEq4);
    }
    t.hd.lstm = {p.at("head.lstm.Wx"), p.at("head.lstm.Wh"), p.at("head.lstm.b")};
    t.hd.W1 = p.at("head.fc1.W");
    t.hd.b1 = p.at("head.fc1.b");
    t.hd.W2 = p.at("head.fc2.W");
    t.hd.b2 = p.at("head.fc2.b");
    return t;
}

void add_masknet_layout(ParameterSet& p, const std::string& prefix, int in, int hidden, int out) {
    p.add(prefix + ".W1", hidden, in);
    p.add(prefix + ".b1", hidden, 1);
    p.add(prefix + ".W2", out, hidden);
    p.add(prefix + ".b2", out, 1);
}

void scatter_masknet(ParameterSet& g, const std::string& prefix, const fusion::MaskGrads& mg) {
    g.at(prefix + ".W1") += mg.dW1;
    g.at(prefix + ".b1") += mg.db1;
    g.at(prefix + ".W2") += mg.dW2;
    g.at(prefix + ".b2") += mg.db2;
}

}  // namespace

FusionMode fusion_mode_from_string(const std::string& s) {
    if (s == "two_stage") return FusionMode::TwoStage;
    if (s == "baseline") return FusionMode::Baseline;
    if (s == "literal_eq4") return FusionMode::LiteralEq4;
    throw config_error("unknown fusion mode '" + s + "' (two_stage | baseline | literal_eq4)");
}

std::string to_string(FusionMode m) {
    switch (m) {
        case FusionMode::TwoStage: return "two_stage";
        case FusionMode::Baseline: return "baseline";
        case FusionMode::LiteralEq4: return "literal_eq4";
    }
    return "two_stage";
}

ParameterSet Model::zero_params() const {
    ParameterSet p;
    const int n4 = dims_.n_keypoints * 4;
    const int pix = dims_.image_h * dims_.image_w;
    p.add("radar.fc.W", dims_.f_m, n4);
    p.add("radar.fc.b", dims_.f_m, 1);
    p.add("visual.fc.W", dims_.f_v, pix);
    p.add("visual.fc.b", dims_.f_v, 1);
    p.add("imu.lstm.Wx", 4 * dims_.f_i, 6);
    p.add("imu.lstm.Wh", 4 * dims_.f_i, dims_.f_i);
    p.add("imu.lstm.b", 4 * dims_.f_i, 1);
    if (mode_ == FusionMode::Baseline) {
        const int cat = dims_.fused_dim();
        add_masknet_layout(p, "fusion.base.M", cat, dims_.f_m, dims_.f_m);
        add_masknet_layout(p, "fusion.base.V", cat, dims_.f_v, dims_.f_v);
        add_masknet_layout(p, "fusion.base.I", cat, dims_.f_i, dims_.f_i);
    } else {
        add_masknet_layout(p, "fusion.self.M", dims_.f_m, dims_.f_m, dims_.f_m);
        add_masknet_layout(p, "fusion.self.V", dims_.f_v, dims_.f_v, dims_.f_v);
        add_masknet_layout(p, "fusion.self.I", dims_.f_i, dims_.f_i, dims_.f_i);
        add_masknet_layout(p, "fusion.cross.M", dims_.f_v + dims_.f_i, dims_.f_m, dims_.f_m);
        add_masknet_layout(p, "fusion.cross.I", dims_.f_m + dims_.f_v, dims_.f_i, dims_.f_i);
        add_masknet_layout(p, "fusion.cross.V", dims_.f_m + dims_.f_i, dims_.f_v, dims_.f_v);
    }
    p.add("head.lstm.Wx", 4 * dims_.hidden, dims_.fused_dim());
    p.add("head.lstm.Wh", 4 * dims_.hidden, dims_.hidden);
    p.add("head.lstm.b", 4 * dims_.hidden, 1);
    p.add("head.fc1.W", dims_.hidden, dims_.hidden);
    p.add("head.fc1.b", dims_.hidden, 1);
    p.add("head.fc2.W", 6, dims_.hidden);
    p.add("head.fc2.b", 6, 1);
    return p;
}

ParameterSet Model::init_params(std::uint64_t seed) const {
    ParameterSet p = zero_params();
    for (auto& e : p.entries()) {
        const bool is_bias = e.name.ends_with(".b") || e.name.ends_with(".b1") ||
                             e.name.ends_with(".b2");
        if (is_bias) continue;  // biases stay zero; LSTM forget bias set below
        auto rng = named_stream(seed, "init/" + e.name);
        const double bound = 1.0 / std::sqrt(static_cast<double>(e.value.cols()));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index c = 0; c < e.value.cols(); ++c)
            for (Eigen::Index r = 0; r < e.value.rows(); ++r) e.value(r, c) = dist(rng);
    }
    // Forget-gate bias 1.0 (gate block order [i; f; g; o]).
    for (const char* name : {"imu.lstm.b", "head.lstm.b"}) {
        auto& b = p.at(name);
        const Eigen::Index h = b.rows() / 4;
        b.block(h, 0, h, 1).setConstant(1.0);
    }
    return p;
}

void Model::validate_frame(const EstimationFrame& frame) const {
    const auto n = static_cast<std::size_t>(dims_.n_keypoints);
    if (frame.kp0.keypoints.size() != n || frame.kp1.keypoints.size() != n)
        throw data_error("frame has wrong keypoint count");
    for (const auto* kf : {&frame.kp0, &frame.kp1}) {
        for (const auto& kp : kf->keypoints) {
            if (kp.descriptor.size() != dims_.descriptor_dim)
                throw data_error("keypoint descriptor dimension mismatch");
        }
    }
    const Eigen::Index pix = static_cast<Eigen::Index>(dims_.image_h) * dims_.image_w;
    if (frame.images.img0.size() != pix || frame.images.img1.size() != pix)
        throw data_error("image size mismatch");
    if (!frame.imu.allFinite()) throw data_error("non-finite IMU sample");
}

Model::WindowTape Model::forward_window(const std::vector<const EstimationFrame*>& frames,
                                        const ParameterSet& params,
                                        const encoders::LstmState& state_in,
                                        const head::PoseWeights& weights) const {
    Typed t = bind(params, mode_);
    WindowTape tape;
    tape.state_in = state_in;
    tape.frames.resize(frames.size());
    encoders::LstmState state = state_in;
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const EstimationFrame& f = *frames[k];
        FrameTape& ft = tape.frames[k];

        auto match = radar::softmax_match(f.kp0, f.kp1, dims_.match_temperature);
        ft.delta = radar::build_delta_matrix(f.kp0, f.kp1, match);
        Eigen::VectorXd z_M = radar::radar_encode(ft.delta, t.radar_W, t.radar_b);
        check_stage(z_M, "radar_encode", k);

        Eigen::VectorXd z_I = encoders::imu_encode(f.imu, t.imu, &ft.imu_tape);
        check_stage(z_I, "imu_encode", k);

        Eigen::VectorXd z_V = encoders::visual_encode(f.images, t.vis_W, t.vis_b, &ft.vis_cache);
        check_stage(z_V, "visual_encode", k);

        fusion::ModalityFeatures m{z_M, z_V, z_I};
        Eigen::VectorXd fused;
        if (mode_ == FusionMode::Baseline) {
            fused = fusion::fuse_baseline(m, t.base, &ft.masks, &ft.base_cache);
        } else {
            fused = fusion::fuse(m, t.fus, &ft.masks, &ft.fuse_cache);
        }
        check_stage(fused, "fuse", k);

        state = head::temporal_step(fused, state, t.hd.lstm, &ft.head_cache);
        check_stage(state.h, "temporal_step", k);

        ft.pred = head::pose_regress(state.h, t.hd, &ft.reg_cache);
        check_stage(ft.pred.vec(), "pose_regress", k);
        ft.gt = f.gt;
        ft.loss = head::weighted_mse(ft.pred, ft.gt, weights);
        if (!std::isfinite(ft.loss))
            throw numerical_error("non-finite loss at frame " + std::to_string(k));
        tape.loss_sum += ft.loss;
    }
    tape.state_out = state;
    return tape;
}

void Model::backward_window(const WindowTape& tape, const ParameterSet& params,
                            const head::PoseWeights& weights, ParameterSet& grads) const {
    Typed t = bind(params, mode_);
    encoders::LstmGrads imu_g = encoders::LstmGrads::zero(t.imu);
    encoders::LstmGrads head_g = encoders::LstmGrads::zero(t.hd.lstm);
    head::RegressGrads reg_g = head::RegressGrads::zero(t.hd);
    fusion::FusionGrads fus_g = fusion::FusionGrads::zero(t.fus);
    fusion::BaselineGrads base_g = fusion::BaselineGrads::zero(t.base);
    Eigen::MatrixXd radar_dW = Eigen::MatrixXd::Zero(t.radar_W.rows(), t.radar_W.cols());
    Eigen::VectorXd radar_db = Eigen::VectorXd::Zero(t.radar_b.size());
    Eigen::MatrixXd vis_dW = Eigen::MatrixXd::Zero(t.vis_W.rows(), t.vis_W.cols());
    Eigen::VectorXd vis_db = Eigen::VectorXd::Zero(t.vis_b.size());

    Eigen::VectorXd g_h = Eigen::VectorXd::Zero(dims_.hidden);
    Eigen::VectorXd g_c = Eigen::VectorXd::Zero(dims_.hidden);
    for (auto k = static_cast<std::ptrdiff_t>(tape.frames.size()) - 1; k >= 0; --k) {
        const FrameTape& ft = tape.frames[static_cast<std::size_t>(k)];
        geom::Vector6d g_pose = head::weighted_mse_grad(ft.pred, ft.gt, weights);
        g_h += head::pose_regress_backward(g_pose, ft.reg_cache, t.hd, reg_g);
        auto lstm_in = encoders::lstm_step_backward(g_h, g_c, ft.head_cache, t.hd.lstm, head_g);
        g_h = lstm_in.g_h_prev;
        g_c = lstm_in.g_c_prev;

        fusion::ModalityFeatures g_z;
        if (mode_ == FusionMode::Baseline) {
            g_z = fusion::fuse_baseline_backward(lstm_in.g_x, ft.base_cache, t.base, base_g);
        } else {
            g_z = fusion::fuse_backward(lstm_in.g_x, ft.fuse_cache, t.fus, fus_g);
        }

        // Radar branch: only the FC parameters sit downstream of data.
        radar_dW.noalias() += g_z.z_M * radar::flatten_delta(ft.delta).transpose();
        radar_db += g_z.z_M;

        encoders::imu_encode_backward(g_z.z_I, ft.imu_tape, t.imu, imu_g);

        auto vg = encoders::visual_encode_backward(g_z.z_V, ft.vis_cache, t.vis_W);
        vis_dW += vg.dW;
        vis_db += vg.db;
    }

    grads.at("radar.fc.W") += radar_dW;
    grads.at("radar.fc.b") += radar_db;
    grads.at("visual.fc.W") += vis_dW;
    grads.at("visual.fc.b") += vis_db;
    grads.at("imu.lstm.Wx") += imu_g.dWx;
    grads.at("imu.lstm.Wh") += imu_g.dWh;
    grads.at("imu.lstm.b") += imu_g.db;
    if (mode_ == FusionMode::Baseline) {
        scatter_masknet(grads, "fusion.base.M", base_g.mask_M);
        scatter_masknet(grads, "fusion.base.V", base_g.mask_V);
        scatter_masknet(grads, "fusion.base.I", base_g.mask_I);
    } else {
        scatter_masknet(grads, "fusion.self.M", fus_g.self_M);
        scatter_masknet(grads, "fusion.self.V", fus_g.self_V);
        scatter_masknet(grads, "fusion.self.I", fus_g.self_I);
        scatter_masknet(grads, "fusion.cross.M", fus_g.cross_M);
        scatter_masknet(grads, "fusion.cross.V", fus_g.cross_V);
        scatter_masknet(grads, "fusion.cross.I", fus_g.cross_I);
    }
    grads.at("head.lstm.Wx") += head_g.dWx;
    grads.at("head.lstm.Wh") += head_g.dWh;
    grads.at("head.lstm.b") += head_g.db;
    grads.at("head.fc1.W") += reg_g.dW1;
    grads.at("head.fc1.b") += reg_g.db1;
    grads.at("head.fc2.W") += reg_g.dW2;
    grads.at("head.fc2.b") += reg_g.db2;
}

Model::FrameResult Model::forward_frame(const EstimationFrame& frame, const ParameterSet& params,
                                        const encoders::LstmState& state_in,
                                        const head::PoseWeights& weights) const {
    WindowTape tape = forward_window({&frame}, params, state_in, weights);
    FrameResult out;
    out.pred = tape.frames[0].pred;
    out.masks = tape.frames[0].masks;
    out.state = tape.state_out;
    out.loss = tape.frames[0].loss;
    return out;
}

}  // namespace raci
