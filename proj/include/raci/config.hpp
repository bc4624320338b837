#pragma once

#include "raci/head.hpp"
#include "raci/learn.hpp"
#include "raci/model.hpp"
#include "raci/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace raci {

/// One config file drives every CLI command; CLI flags override fields.
struct RunConfig {
    std::uint64_t seed = 1;
    ModelDims dims;
    std::string fusion_mode = "two_stage";
    learn::TrainConfig train;
    head::PoseWeights pose_weights = head::default_pose_weights();
    std::vector<double> metric_lengths = {10, 20, 30, 40, 50, 60, 70, 80};

    struct Scenario {
        std::string name;
        ScenarioConfig config;
    };
    std::vector<Scenario> train_scenarios;
    std::vector<Scenario> eval_scenarios;

    std::filesystem::path scenes_dir = "scenes";
    std::filesystem::path checkpoint_path = "model.ckpt";
    std::filesystem::path reports_dir = "reports";

    void validate() const;  // throws config_error
    std::uint64_t hash() const;

    Model make_model() const {
        return Model(dims, fusion_mode_from_string(fusion_mode));
    }
};

/// Parses the JSON config file; unknown keys are rejected so typos fail
/// loudly. Missing sections keep their defaults.
RunConfig load_run_config(const std::filesystem::path& path);

/// The built-in 5-weather desk-scale suite used when no config is given.
RunConfig default_run_config();

}  // namespace raci
