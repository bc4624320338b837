#pragma once

#include "raci/encoders.hpp"
#include "raci/geom.hpp"
#include "raci/radar.hpp"

#include <string>
#include <vector>

namespace raci {

/// Sensor degradation magnitudes for one weather condition. Magnitudes are
/// simulation parameters; the labels mirror the Boreas conditions.
struct WeatherProfile {
    std::string name;                  // sunny | overcast | cloudy | rainy | snowing
    double visual_noise_std = 0.0;
    double visual_dropout = 0.0;       // in [0,1]
    double radar_jitter_std = 0.0;     // meters
    double descriptor_noise_std = 0.0;
    double imu_noise_std = 0.0;
    double imu_bias_scale = 0.0;
};

/// The five built-in profiles; visual corruption is monotone from sunny
/// through snowing.
const std::vector<WeatherProfile>& default_weather_profiles();
WeatherProfile weather_profile(const std::string& name);

struct ScenarioConfig {
    std::uint64_t seed = 1;
    double duration_s = 31.0;
    double radar_rate_hz = 10.0;
    int landmark_count = 600;
    double field_extent_m = 60.0;   // half-width of the landmark band
    double max_range_m = 80.0;
    double speed_mps = 4.0;
    double speed_variation = 0.0;   // relative sinusoidal modulation
    std::string curvature_mode = "random";  // random | constant
    double curvature_max = 0.05;    // 1/m, per-segment magnitude (random mode)
    double curvature_const = 0.0;   // 1/m, fixed value (constant mode)
    double segment_s = 6.0;         // curvature segment duration
    double vertical_amplitude = 0.02;  // z/roll/pitch perturbation scale
    std::string weather = "sunny";
    int n_keypoints = 16;
    int descriptor_dim = 8;
    int image_h = 32;
    int image_w = 32;

    void validate() const;  // throws config_error
};

/// One radar-to-radar interval: two keypoint frames, the two nearest
/// images, 48 IMU samples, and the ground-truth relative pose.
struct EstimationFrame {
    double t0 = 0.0, t1 = 0.0;
    radar::KeypointFrame kp0, kp1;
    encoders::ImagePair images;
    encoders::ImuWindow imu;
    geom::RelativePose gt;
};

struct Scene {
    std::string name;
    ScenarioConfig config;
    std::vector<EstimationFrame> frames;
    geom::Trajectory gt_trajectory;
};

}  // namespace raci
