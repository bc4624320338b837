#include "raci/synthsim.hpp"

#include "raci/errors.hpp"
#include "raci/rng.hpp"

#include <algorithm>
#include <cmath>

namespace raci {

const std::vector<WeatherProfile>& default_weather_profiles() {
    // Visual corruption is monotone non-decreasing down the table.
    static const std::vector<WeatherProfile> profiles = {
        {"sunny",    0.01, 0.00, 0.005, 0.01, 0.005, 0.002},
        {"overcast", 0.02, 0.05, 0.008, 0.02, 0.008, 0.003},
        {"cloudy",   0.04, 0.15, 0.010, 0.03, 0.010, 0.004},
        {"rainy",    0.06, 0.50, 0.030, 0.10, 0.020, 0.008},
        {"snowing",  0.10, 0.90, 0.050, 0.20, 0.030, 0.010},
    };
    return profiles;
}

WeatherProfile weather_profile(const std::string& name) {
    for (const auto& p : default_weather_profiles()) {
        if (p.name == name) return p;
    }
    throw config_error("unknown weather profile '" + name +
                       "' (sunny | overcast | cloudy | rainy | snowing)");
}

void ScenarioConfig::validate() const {
    if (!(duration_s > 0.0)) throw config_error("scenario.duration_s must be > 0");
    if (!(radar_rate_hz > 0.0)) throw config_error("scenario.radar_rate_hz must be > 0");
    if (landmark_count < 1) throw config_error("scenario.landmark_count must be >= 1");
    if (!(max_range_m > 0.0)) throw config_error("scenario.max_range_m must be > 0");
    if (speed_mps < 0.0) throw config_error("scenario.speed_mps must be >= 0");
    if (curvature_mode != "random" && curvature_mode != "constant")
        throw config_error("scenario.curvature_mode must be 'random' or 'constant'");
    if (n_keypoints < 1 || descriptor_dim < 1)
        throw config_error("scenario.n_keypoints and descriptor_dim must be >= 1");
    if (image_h < 1 || image_w < 1) throw config_error("scenario.image size must be >= 1");
    const double scans = duration_s * radar_rate_hz;
    if (std::llround(scans) < 2) throw config_error("scenario too short: needs >= 2 radar scans");
    weather_profile(weather);
}

}  // namespace raci

namespace raci::synthsim {

namespace {

// Piecewise-constant curvature with linear blending over 20% of the
// segment on each side of a boundary.
double curvature_at(double t, const ScenarioConfig& cfg, const std::vector<double>& segs) {
    if (cfg.curvature_mode == "constant") return cfg.curvature_const;
    const double seg = cfg.segment_s;
    const double blend = 0.2 * seg;
    const auto n = static_cast<std::ptrdiff_t>(segs.size());
    auto idx = static_cast<std::ptrdiff_t>(std::floor(t / seg));
    idx = std::clamp<std::ptrdiff_t>(idx, 0, n - 1);
    const double local = t - static_cast<double>(idx) * seg;
    if (local > seg - blend && idx + 1 < n) {
        const double a = (local - (seg - blend)) / blend;  // 0 -> 1
        return (1.0 - a) * segs[idx] + a * segs[idx + 1];
    }
    return segs[idx];
}

double speed_at(double t, const ScenarioConfig& cfg) {
    return cfg.speed_mps * (1.0 + cfg.speed_variation * std::sin(0.35 * t));
}

}  // namespace

GroundTruth generate_trajectory(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto n_scans = static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.radar_rate_hz));
    const double dt_frame = 1.0 / cfg.radar_rate_hz;
    const double dt = dt_frame / encoders::kImuSamples;

    std::vector<double> segs;
    if (cfg.curvature_mode == "random") {
        auto rng = named_stream(cfg.seed, "curvature");
        std::uniform_real_distribution<double> dist(-cfg.curvature_max, cfg.curvature_max);
        const auto n_segs = static_cast<std::size_t>(std::ceil(cfg.duration_s / cfg.segment_s)) + 1;
        segs.reserve(n_segs);
        for (std::size_t i = 0; i < n_segs; ++i) segs.push_back(dist(rng));
    }

    GroundTruth gt;
    gt.dt_imu = dt;
    const std::size_t n_dense = encoders::kImuSamples * (n_scans - 1) + 1;
    gt.dense.resize(n_dense + 2);  // one guard sample on each end

    const double A = cfg.vertical_amplitude;
    double x = 0.0, y = 0.0, theta = 0.0;
    // March the planar state from t = -dt so the guard sample is exact.
    {
        const double tm = -0.5 * dt;
        const double v = speed_at(tm, cfg);
        const double kappa = curvature_at(std::max(tm, 0.0), cfg, segs);
        const double th_m = theta - 0.5 * v * kappa * dt;
        x -= v * dt * std::cos(th_m);
        y -= v * dt * std::sin(th_m);
        theta -= v * kappa * dt;
    }
    for (std::size_t j = 0; j < gt.dense.size(); ++j) {
        const double t = (static_cast<double>(j) - 1.0) * dt;
        MotionSample s;
        s.t = t;
        s.position = Eigen::Vector3d(x, y, A * std::sin(0.5 * t));
        const double roll = 0.5 * A * std::sin(0.3 * t);
        const double pitch = 0.4 * A * std::sin(0.4 * t);
        s.rotation = geom::euler_to_rotation(roll, pitch, theta);
        gt.dense[j] = s;
        // Midpoint advance to the next dense sample.
        const double tm = t + 0.5 * dt;
        const double v = speed_at(tm, cfg);
        const double kappa = curvature_at(std::max(tm, 0.0), cfg, segs);
        const double th_m = theta + 0.5 * v * kappa * dt;
        x += v * dt * std::cos(th_m);
        y += v * dt * std::sin(th_m);
        theta += v * kappa * dt;
    }

    gt.scan_poses.reserve(n_scans);
    gt.scan_times.reserve(n_scans);
    for (std::size_t k = 0; k < n_scans; ++k) {
        const auto& s = gt.dense[1 + k * encoders::kImuSamples];
        gt.scan_poses.push_back({s.position, s.rotation});
        gt.scan_times.push_back(static_cast<double>(k) * dt_frame);
    }
    gt.rels.reserve(n_scans - 1);
    for (std::size_t k = 0; k + 1 < n_scans; ++k) {
        gt.rels.push_back(geom::relative_between(gt.scan_poses[k], gt.scan_poses[k + 1]));
    }
    gt.trajectory = geom::compose_trajectory(gt.rels, gt.scan_times);
    return gt;
}

std::vector<Landmark> scatter_landmarks(const GroundTruth& gt, const ScenarioConfig& cfg) {
    double minx = 0, maxx = 0, miny = 0, maxy = 0;
    for (const auto& p : gt.scan_poses) {
        minx = std::min(minx, p.translation.x());
        maxx = std::max(maxx, p.translation.x());
        miny = std::min(miny, p.translation.y());
        maxy = std::max(maxy, p.translation.y());
    }
    auto pos_rng = named_stream(cfg.seed, "landmarks");
    auto desc_rng = named_stream(cfg.seed, "descriptors");
    std::uniform_real_distribution<double> ux(minx - cfg.field_extent_m, maxx + cfg.field_extent_m);
    std::uniform_real_distribution<double> uy(miny - cfg.field_extent_m, maxy + cfg.field_extent_m);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Landmark> out(cfg.landmark_count);
    for (auto& lm : out) {
        lm.position = Eigen::Vector2d(ux(pos_rng), uy(pos_rng));
        lm.descriptor.resize(cfg.descriptor_dim);
        do {
            for (int d = 0; d < cfg.descriptor_dim; ++d) lm.descriptor[d] = gauss(desc_rng);
        } while (lm.descriptor.norm() < 1e-9);
        lm.descriptor.normalize();
    }
    return out;
}

std::vector<radar::KeypointFrame> simulate_radar(const GroundTruth& gt,
                                                 const std::vector<Landmark>& landmarks,
                                                 const ScenarioConfig& cfg,
                                                 const WeatherProfile& weather) {
    auto jitter_rng = named_stream(cfg.seed, "radar_jitter");
    auto desc_rng = named_stream(cfg.seed, "radar_desc_noise");
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<radar::KeypointFrame> frames;
    frames.reserve(gt.scan_poses.size());
    for (std::size_t k = 0; k < gt.scan_poses.size(); ++k) {
        const auto& pose = gt.scan_poses[k];
        // (range, landmark id) of visible landmarks, nearest first.
        std::vector<std::pair<double, std::size_t>> visible;
        for (std::size_t i = 0; i < landmarks.size(); ++i) {
            Eigen::Vector3d world(landmarks[i].position.x(), landmarks[i].position.y(), 0.0);
            Eigen::Vector3d ego = pose.rotation.transpose() * (world - pose.translation);
            const double range = std::hypot(ego.x(), ego.y());
            if (range <= cfg.max_range_m) visible.emplace_back(range, i);
        }
        std::sort(visible.begin(), visible.end());
        if (static_cast<int>(visible.size()) > cfg.n_keypoints) visible.resize(cfg.n_keypoints);

        radar::KeypointFrame frame;
        frame.timestamp = gt.scan_times[k];
        frame.keypoints.reserve(visible.size());
        for (const auto& [range, i] : visible) {
            Eigen::Vector3d world(landmarks[i].position.x(), landmarks[i].position.y(), 0.0);
            Eigen::Vector3d ego = pose.rotation.transpose() * (world - pose.translation);
            radar::Keypoint kp;
            kp.x = ego.x() + weather.radar_jitter_std * gauss(jitter_rng);
            kp.y = ego.y() + weather.radar_jitter_std * gauss(jitter_rng);
            kp.score = std::clamp(1.0 - range / cfg.max_range_m, 0.0, 1.0);
            kp.descriptor = landmarks[i].descriptor;
            for (int d = 0; d < cfg.descriptor_dim; ++d)
                kp.descriptor[d] += weather.descriptor_noise_std * gauss(desc_rng);
            const double norm = kp.descriptor.norm();
            if (norm > 1e-12) kp.descriptor /= norm;
            frame.keypoints.push_back(std::move(kp));
        }
        frames.push_back(radar::fit_to_count(std::move(frame), cfg.n_keypoints, cfg.descriptor_dim));
    }
    return frames;
}

std::vector<encoders::ImuWindow> simulate_imu(const GroundTruth& gt, const ScenarioConfig& cfg,
                                              const WeatherProfile& weather) {
    auto bias_rng = named_stream(cfg.seed, "imu_bias");
    auto noise_rng = named_stream(cfg.seed, "imu_noise");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Vector3d accel_bias, gyro_bias;
    for (int i = 0; i < 3; ++i) accel_bias[i] = weather.imu_bias_scale * gauss(bias_rng);
    for (int i = 0; i < 3; ++i) gyro_bias[i] = weather.imu_bias_scale * gauss(bias_rng);

    const double dt = gt.dt_imu;
    const std::size_t n_frames = gt.scan_poses.size() - 1;
    std::vector<encoders::ImuWindow> windows(n_frames);
    for (std::size_t k = 0; k < n_frames; ++k) {
        for (int s = 0; s < encoders::kImuSamples; ++s) {
            const std::size_t j = 1 + k * encoders::kImuSamples + s;
            const auto& prev = gt.dense[j - 1];
            const auto& cur = gt.dense[j];
            const auto& next = gt.dense[j + 1];
            // Gravity excluded by simulator convention.
            Eigen::Vector3d accel_world =
                (next.position - 2.0 * cur.position + prev.position) / (dt * dt);
            Eigen::Vector3d accel = cur.rotation.transpose() * accel_world;
            Eigen::AngleAxisd aa(cur.rotation.transpose() * next.rotation);
            Eigen::Vector3d gyro = aa.angle() / dt * aa.axis();

            for (int i = 0; i < 3; ++i) {
                windows[k](s, i) =
                    accel[i] + accel_bias[i] + weather.imu_noise_std * gauss(noise_rng);
                windows[k](s, 3 + i) =
                    gyro[i] + gyro_bias[i] + weather.imu_noise_std * gauss(noise_rng);
            }
        }
    }
    return windows;
}

std::vector<Eigen::VectorXd> simulate_visual(const GroundTruth& gt, const ScenarioConfig& cfg,
                                             const WeatherProfile& weather) {
    auto noise_rng = named_stream(cfg.seed, "visual_noise");
    auto drop_rng = named_stream(cfg.seed, "visual_dropout");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    // Occlusion models precipitation stuck on the lens: a per-scene static
    // pixel set painted a constant bright value in every frame, so the
    // covered pixels carry no motion signal at all.
    const int n_pixels = cfg.image_h * cfg.image_w;
    std::vector<bool> occluded(n_pixels, false);
    for (int i = 0; i < n_pixels; ++i)
        occluded[i] = weather.visual_dropout > 0.0 && uniform(drop_rng) < weather.visual_dropout;

    const double pixel_m = 0.25;  // ground-plane meters per pixel
    std::vector<Eigen::VectorXd> images;
    images.reserve(gt.scan_poses.size());
    for (std::size_t k = 0; k < gt.scan_poses.size(); ++k) {
        const auto& pose = gt.scan_poses[k];
        const double yaw = std::atan2(pose.rotation(1, 0), pose.rotation(0, 0));
        const double cy = std::cos(yaw), sy = std::sin(yaw);
        Eigen::VectorXd img(n_pixels);
        for (int r = 0; r < cfg.image_h; ++r) {
            for (int c = 0; c < cfg.image_w; ++c) {
                const int idx = r * cfg.image_w + c;
                if (occluded[idx]) {
                    img[idx] = 1.0;
                    continue;
                }
                // Ground patch ahead of the vehicle, yaw-aligned.
                const double lx = 0.5 + r * pixel_m;
                const double ly = (c - 0.5 * (cfg.image_w - 1)) * pixel_m;
                const double wx = pose.translation.x() + cy * lx - sy * ly;
                const double wy = pose.translation.y() + sy * lx + cy * ly;
                double v = 0.5 + 0.25 * std::sin(1.3 * wx) + 0.25 * std::sin(1.7 * wy);
                v += weather.visual_noise_std * gauss(noise_rng);
                img[idx] = std::clamp(v, 0.0, 1.0);
            }
        }
        images.push_back(std::move(img));
    }
    return images;
}

Scene generate_scene(const ScenarioConfig& cfg, const std::string& name) {
    cfg.validate();
    const WeatherProfile weather = weather_profile(cfg.weather);
    GroundTruth gt = generate_trajectory(cfg);
    auto landmarks = scatter_landmarks(gt, cfg);
    auto radar_frames = simulate_radar(gt, landmarks, cfg, weather);
    auto imu_windows = simulate_imu(gt, cfg, weather);
    auto images = simulate_visual(gt, cfg, weather);

    Scene scene;
    scene.name = name;
    scene.config = cfg;
    scene.gt_trajectory = gt.trajectory;
    const std::size_t n_frames = gt.rels.size();
    scene.frames.resize(n_frames);
    for (std::size_t k = 0; k < n_frames; ++k) {
        EstimationFrame& f = scene.frames[k];
        f.t0 = gt.scan_times[k];
        f.t1 = gt.scan_times[k + 1];
        f.kp0 = radar_frames[k];
        f.kp1 = radar_frames[k + 1];
        f.images.img0 = images[k];
        f.images.img1 = images[k + 1];
        f.images.height = cfg.image_h;
        f.images.width = cfg.image_w;
        f.imu = imu_windows[k];
        f.gt = gt.rels[k];
    }
    return scene;
}

}  // namespace raci::synthsim
