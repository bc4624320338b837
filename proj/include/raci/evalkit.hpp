#pragma once

#include "raci/learn.hpp"
#include "raci/model.hpp"
#include "raci/scene.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace raci::evalkit {

/// One subsequence error: translational drift as a percentage of the
/// subsequence length, rotational drift in degrees per meter.
struct DriftSample {
    std::size_t start = 0;
    double length = 0.0;   // meters, the nominal subsequence length
    double t_err = 0.0;    // percent
    double r_err = 0.0;    // degrees per meter
};

struct TaggedSample {
    DriftSample sample;
    std::string scene;
    std::string weather;
};

/// KITTI-style relative drift: for every start pose and every length L,
/// the first ground-truth pose at least L meters of arclength ahead closes
/// the segment; the error pose is gt_rel^-1 * pred_rel. Starts without
/// enough remaining arclength are skipped.
std::vector<DriftSample> kitti_drift(const geom::Trajectory& gt, const geom::Trajectory& pred,
                                     const std::vector<double>& lengths);

enum class GroupBy { Length, Weather };

struct DriftReport {
    struct Row {
        std::string group;
        double t_err = 0.0;          // percent
        double r_err_per_m = 0.0;    // degrees per meter
        std::size_t samples = 0;
    };
    std::vector<Row> rows;
    double avg_t_err = 0.0;          // mean of group means (the tables' Avg row)
    double avg_r_err_per_m = 0.0;
};

DriftReport aggregate(const std::vector<TaggedSample>& samples, GroupBy group_by);

/// CSV: "group,t_err_pct,r_err_deg_per_100m,samples" plus an Avg row.
void write_report_csv(const std::filesystem::path& path, const DriftReport& report);

/// Composes per-frame predictions (temporal state carried across the
/// scene) into a trajectory aligned with the scene's ground truth.
geom::Trajectory predict_trajectory(const Scene& scene, const Model& model,
                                    const ParameterSet& params,
                                    const head::PoseWeights& weights);

/// Drift samples of one checkpoint over a set of scenes.
std::vector<TaggedSample> evaluate_scenes(const std::vector<Scene>& scenes, const Model& model,
                                          const ParameterSet& params,
                                          const head::PoseWeights& weights,
                                          const std::vector<double>& lengths);

}  // namespace raci::evalkit
