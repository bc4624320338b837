#pragma once

#include "raci/scene.hpp"

#include <Eigen/Geometry>

#include <string>
#include <vector>

namespace raci::synthsim {

/// Ground-truth motion sampled densely (48 IMU samples per radar frame,
/// one extra sample on each end for finite differences).
struct MotionSample {
    double t = 0.0;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

struct GroundTruth {
    std::vector<MotionSample> dense;    // index j covers t = (j-1)*dt_imu
    std::vector<geom::AbsolutePose> scan_poses;  // world pose per radar scan
    std::vector<double> scan_times;
    std::vector<geom::RelativePose> rels;        // per estimation frame
    geom::Trajectory trajectory;        // composed from rels, identity start
    double dt_imu = 0.0;
};

/// Planar-dominant smooth motion: piecewise constant-curvature arcs with
/// blended transitions plus small sinusoidal z/roll/pitch perturbations.
GroundTruth generate_trajectory(const ScenarioConfig& cfg);

/// Persistent landmark field with fixed unit descriptors.
struct Landmark {
    Eigen::Vector2d position;
    Eigen::VectorXd descriptor;
};
std::vector<Landmark> scatter_landmarks(const GroundTruth& gt, const ScenarioConfig& cfg);

/// N nearest visible landmarks per scan, transformed into the ego frame,
/// with weather jitter on positions and descriptor noise (renormalized).
std::vector<radar::KeypointFrame> simulate_radar(const GroundTruth& gt,
                                                 const std::vector<Landmark>& landmarks,
                                                 const ScenarioConfig& cfg,
                                                 const WeatherProfile& weather);

/// 48 body-frame samples per estimation frame: second finite difference of
/// position (gravity excluded by simulator convention) and finite-difference
/// angular rate, plus per-scene bias and white noise.
std::vector<encoders::ImuWindow> simulate_imu(const GroundTruth& gt, const ScenarioConfig& cfg,
                                              const WeatherProfile& weather);

/// Deterministic world-anchored sinusoid texture sampled under the ego
/// pose; weather adds Gaussian noise and pixel dropout.
std::vector<Eigen::VectorXd> simulate_visual(const GroundTruth& gt, const ScenarioConfig& cfg,
                                             const WeatherProfile& weather);

Scene generate_scene(const ScenarioConfig& cfg, const std::string& name);

}  // namespace raci::synthsim
