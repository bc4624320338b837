#include "raci/sceneio.hpp"

#include "raci/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace raci::sceneio {

namespace {

using json = nlohmann::ordered_json;

json config_to_json(const ScenarioConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["duration_s"] = c.duration_s;
    j["radar_rate_hz"] = c.radar_rate_hz;
    j["landmark_count"] = c.landmark_count;
    j["field_extent_m"] = c.field_extent_m;
    j["max_range_m"] = c.max_range_m;
    j["speed_mps"] = c.speed_mps;
    j["speed_variation"] = c.speed_variation;
    j["curvature_mode"] = c.curvature_mode;
    j["curvature_max"] = c.curvature_max;
    j["curvature_const"] = c.curvature_const;
    j["segment_s"] = c.segment_s;
    j["vertical_amplitude"] = c.vertical_amplitude;
    j["weather"] = c.weather;
    j["n_keypoints"] = c.n_keypoints;
    j["descriptor_dim"] = c.descriptor_dim;
    j["image_h"] = c.image_h;
    j["image_w"] = c.image_w;
    return j;
}

ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.duration_s = j.at("duration_s").get<double>();
    c.radar_rate_hz = j.at("radar_rate_hz").get<double>();
    c.landmark_count = j.at("landmark_count").get<int>();
    c.field_extent_m = j.at("field_extent_m").get<double>();
    c.max_range_m = j.at("max_range_m").get<double>();
    c.speed_mps = j.at("speed_mps").get<double>();
    c.speed_variation = j.at("speed_variation").get<double>();
    c.curvature_mode = j.at("curvature_mode").get<std::string>();
    c.curvature_max = j.at("curvature_max").get<double>();
    c.curvature_const = j.at("curvature_const").get<double>();
    c.segment_s = j.at("segment_s").get<double>();
    c.vertical_amplitude = j.at("vertical_amplitude").get<double>();
    c.weather = j.at("weather").get<std::string>();
    c.n_keypoints = j.at("n_keypoints").get<int>();
    c.descriptor_dim = j.at("descriptor_dim").get<int>();
    c.image_h = j.at("image_h").get<int>();
    c.image_w = j.at("image_w").get<int>();
    return c;
}

json keypoints_to_json(const radar::KeypointFrame& kf) {
    json rows = json::array();
    for (const auto& kp : kf.keypoints) {
        json row = json::array();
        row.push_back(kp.x);
        row.push_back(kp.y);
        row.push_back(kp.score);
        for (Eigen::Index d = 0; d < kp.descriptor.size(); ++d) row.push_back(kp.descriptor[d]);
        rows.push_back(std::move(row));
    }
    return rows;
}

radar::KeypointFrame keypoints_from_json(const json& rows, double timestamp, int n, int d) {
    if (static_cast<int>(rows.size()) != n) throw data_error("scene: keypoint row count mismatch");
    radar::KeypointFrame kf;
    kf.timestamp = timestamp;
    kf.keypoints.reserve(n);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != 3 + d)
            throw data_error("scene: keypoint column count mismatch");
        radar::Keypoint kp;
        kp.x = row[0].get<double>();
        kp.y = row[1].get<double>();
        kp.score = row[2].get<double>();
        kp.descriptor.resize(d);
        for (int i = 0; i < d; ++i) kp.descriptor[i] = row[3 + i].get<double>();
        kf.keypoints.push_back(std::move(kp));
    }
    return kf;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr, Eigen::Index expect, const char* what) {
    if (static_cast<Eigen::Index>(arr.size()) != expect)
        throw data_error(std::string("scene: bad array length for ") + what);
    Eigen::VectorXd v(expect);
    for (Eigen::Index i = 0; i < expect; ++i) v[i] = arr[i].get<double>();
    return v;
}

}  // namespace

void write_scene(const std::filesystem::path& dir, const Scene& scene) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw data_error("cannot create scene directory " + dir.string() + ": " + ec.message());

    json meta;
    meta["version"] = kSceneFormatVersion;
    meta["name"] = scene.name;
    meta["weather"] = scene.config.weather;
    meta["frame_count"] = scene.frames.size();
    meta["scenario"] = config_to_json(scene.config);
    {
        std::ofstream os(dir / "meta.json", std::ios::trunc);
        if (!os) throw data_error("cannot write " + (dir / "meta.json").string());
        os << meta.dump(2) << '\n';
    }

    std::ofstream os(dir / "frames.jsonl", std::ios::trunc);
    if (!os) throw data_error("cannot write " + (dir / "frames.jsonl").string());
    for (const auto& f : scene.frames) {
        json j;
        j["timestamps"] = json::array({f.t0, f.t1});
        j["keypoints0"] = keypoints_to_json(f.kp0);
        j["keypoints1"] = keypoints_to_json(f.kp1);
        json imu = json::array();
        for (int r = 0; r < encoders::kImuSamples; ++r) {
            json row = json::array();
            for (int c = 0; c < 6; ++c) row.push_back(f.imu(r, c));
            imu.push_back(std::move(row));
        }
        j["imu"] = std::move(imu);
        j["image0"] = vector_to_json(f.images.img0);
        j["image1"] = vector_to_json(f.images.img1);
        j["gt_rel_pose"] = vector_to_json(f.gt.vec());
        os << j.dump() << '\n';
    }
    if (!os) throw data_error("write failed for " + (dir / "frames.jsonl").string());
}

Scene read_scene(const std::filesystem::path& dir) {
    std::ifstream ms(dir / "meta.json");
    if (!ms) throw data_error("cannot open " + (dir / "meta.json").string());

    Scene scene;
    std::size_t expected_frames = 0;
    try {
        json meta = json::parse(ms, nullptr, true);
        if (!meta.contains("version")) throw data_error("scene meta.json missing version field");
        if (meta["version"].get<int>() != kSceneFormatVersion)
            throw data_error("scene format version mismatch in " + dir.string());
        scene.name = meta.at("name").get<std::string>();
        scene.config = config_from_json(meta.at("scenario"));
        expected_frames = meta.at("frame_count").get<std::size_t>();
    } catch (const json::exception& e) {
        throw data_error("scene meta.json in " + dir.string() + ": " + e.what());
    }

    std::ifstream fs(dir / "frames.jsonl");
    if (!fs) throw data_error("cannot open " + (dir / "frames.jsonl").string());
    const int n = scene.config.n_keypoints;
    const int d = scene.config.descriptor_dim;
    const Eigen::Index pix =
        static_cast<Eigen::Index>(scene.config.image_h) * scene.config.image_w;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(fs, line)) {
        if (line.empty()) continue;
        EstimationFrame f;
        try {
            json j = json::parse(line);
            f.t0 = j.at("timestamps")[0].get<double>();
            f.t1 = j.at("timestamps")[1].get<double>();
            f.kp0 = keypoints_from_json(j.at("keypoints0"), f.t0, n, d);
            f.kp1 = keypoints_from_json(j.at("keypoints1"), f.t1, n, d);
            const auto& imu = j.at("imu");
            if (imu.size() != encoders::kImuSamples)
                throw data_error("scene frame " + std::to_string(line_no) +
                                 ": imu must have 48 rows");
            for (int r = 0; r < encoders::kImuSamples; ++r)
                for (int c = 0; c < 6; ++c) f.imu(r, c) = imu[r][c].get<double>();
            f.images.img0 = vector_from_json(j.at("image0"), pix, "image0");
            f.images.img1 = vector_from_json(j.at("image1"), pix, "image1");
            f.images.height = scene.config.image_h;
            f.images.width = scene.config.image_w;
            f.gt = geom::RelativePose::from_vec(
                vector_from_json(j.at("gt_rel_pose"), 6, "gt_rel_pose"));
        } catch (const json::exception& e) {
            throw data_error("scene frame " + std::to_string(line_no) + ": " + e.what());
        }
        scene.frames.push_back(std::move(f));
        ++line_no;
    }
    if (scene.frames.size() != expected_frames)
        throw data_error("scene " + dir.string() + ": frame count does not match meta.json");

    std::vector<geom::RelativePose> rels;
    std::vector<double> times;
    rels.reserve(scene.frames.size());
    times.reserve(scene.frames.size() + 1);
    times.push_back(scene.frames.empty() ? 0.0 : scene.frames.front().t0);
    for (const auto& f : scene.frames) {
        rels.push_back(f.gt);
        times.push_back(f.t1);
    }
    scene.gt_trajectory = geom::compose_trajectory(rels, times);
    return scene;
}

}  // namespace raci::sceneio
