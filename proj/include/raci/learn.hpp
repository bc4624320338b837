#pragma once

#include "raci/model.hpp"
#include "raci/params.hpp"
#include "raci/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace raci::learn {

struct TrainConfig {
    int batch_size = 8;        // truncation windows per optimizer step
    double learning_rate = 1e-4;
    int epochs = 15;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 1;
    int tbptt_horizon = 8;     // frames per truncation window
    std::string precision = "double";

    void validate() const;  // throws config_error
};

struct AdamState {
    ParameterSet m, v;
    std::uint64_t t = 0;

    static AdamState zero(const ParameterSet& layout) {
        return {layout.zeros_like(), layout.zeros_like(), 0};
    }
};

/// One bias-corrected Adam update; increments state.t.
void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state,
               const TrainConfig& config);

struct Checkpoint {
    std::uint32_t version = 1;
    std::uint64_t config_hash = 0;
    std::uint32_t epoch = 0;
    std::uint64_t rng_seed = 0;
    ParameterSet params;
    AdamState adam;
};

/// Versioned little-endian binary format with name-length-prefixed tensor
/// records; round-trips values exactly.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct LossPoint {
    int epoch = 0;
    int step = 0;
    double loss = 0.0;  // mean per-frame weighted MSE over the batch
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<LossPoint> curve;
    std::vector<double> epoch_loss;  // mean per-frame loss per epoch
};

/// Truncated BPTT over each scene: windows of tbptt_horizon frames, LSTM
/// state carried forward detached; batches group consecutive same-scene
/// windows; scene order shuffled per epoch from the run seed. On a
/// non-finite loss the last good checkpoint is kept and numerical_error
/// is thrown.
/// If last_good is non-null it receives the newest checkpoint that still
/// produced finite losses, which is what survives a numerical abort.
TrainResult train(const std::vector<Scene>& dataset, const Model& model,
                  const TrainConfig& config, const head::PoseWeights& weights,
                  std::uint64_t config_hash = 0,
                  const Checkpoint* resume_from = nullptr,
                  Checkpoint* last_good = nullptr);

void write_loss_csv(const std::filesystem::path& path, const std::vector<LossPoint>& curve);

}  // namespace raci::learn
