#include "raci/config.hpp"

#include "raci/errors.hpp"
#include "raci/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace raci {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key()))
            throw config_error("config: unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

ScenarioConfig parse_scenario(const json& j, const RunConfig& rc, const std::string& where) {
    reject_unknown(j,
                   {"name", "seed", "duration_s", "radar_rate_hz", "landmark_count",
                    "field_extent_m", "max_range_m", "speed_mps", "speed_variation",
                    "curvature_mode", "curvature_max", "curvature_const", "segment_s",
                    "vertical_amplitude", "weather", "n_keypoints", "descriptor_dim", "image_h",
                    "image_w"},
                   where);
    ScenarioConfig c;
    // Model-facing shape fields default to the run's model dims.
    c.n_keypoints = rc.dims.n_keypoints;
    c.descriptor_dim = rc.dims.descriptor_dim;
    c.image_h = rc.dims.image_h;
    c.image_w = rc.dims.image_w;
    maybe(j, "seed", c.seed);
    maybe(j, "duration_s", c.duration_s);
    maybe(j, "radar_rate_hz", c.radar_rate_hz);
    maybe(j, "landmark_count", c.landmark_count);
    maybe(j, "field_extent_m", c.field_extent_m);
    maybe(j, "max_range_m", c.max_range_m);
    maybe(j, "speed_mps", c.speed_mps);
    maybe(j, "speed_variation", c.speed_variation);
    maybe(j, "curvature_mode", c.curvature_mode);
    maybe(j, "curvature_max", c.curvature_max);
    maybe(j, "curvature_const", c.curvature_const);
    maybe(j, "segment_s", c.segment_s);
    maybe(j, "vertical_amplitude", c.vertical_amplitude);
    maybe(j, "weather", c.weather);
    maybe(j, "n_keypoints", c.n_keypoints);
    maybe(j, "descriptor_dim", c.descriptor_dim);
    maybe(j, "image_h", c.image_h);
    maybe(j, "image_w", c.image_w);
    return c;
}

std::vector<RunConfig::Scenario> parse_scenarios(const json& arr, const RunConfig& rc,
                                                 const std::string& where) {
    std::vector<RunConfig::Scenario> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& j = arr[i];
        RunConfig::Scenario s;
        if (!j.contains("name"))
            throw config_error("config: scenario " + std::to_string(i) + " in " + where +
                               " is missing 'name'");
        s.name = j.at("name").get<std::string>();
        s.config = parse_scenario(j, rc, where + "[" + s.name + "]");
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

void RunConfig::validate() const {
    if (dims.n_keypoints < 1 || dims.descriptor_dim < 1 || dims.f_m < 1 || dims.f_v < 1 ||
        dims.f_i < 1 || dims.hidden < 1 || dims.image_h < 1 || dims.image_w < 1) {
        throw config_error("config: model dimensions must all be positive");
    }
    if (!(dims.match_temperature > 0.0))
        throw config_error("config: match_temperature must be > 0");
    fusion_mode_from_string(fusion_mode);
    train.validate();
    for (int i = 0; i < 6; ++i) {
        if (!(pose_weights.w[i] > 0.0) || !std::isfinite(pose_weights.w[i]))
            throw config_error("config: pose weights must be positive and finite");
    }
    if (metric_lengths.empty()) throw config_error("config: metric_lengths must be non-empty");
    for (double L : metric_lengths) {
        if (!(L > 0.0)) throw config_error("config: metric lengths must be > 0");
    }
    for (const auto& s : train_scenarios) s.config.validate();
    for (const auto& s : eval_scenarios) s.config.validate();
}

std::uint64_t RunConfig::hash() const {
    std::ostringstream os;
    os.precision(17);
    os << seed << '|' << dims.n_keypoints << ',' << dims.descriptor_dim << ',' << dims.f_m << ','
       << dims.f_v << ',' << dims.f_i << ',' << dims.hidden << ',' << dims.image_h << ','
       << dims.image_w << ',' << dims.match_temperature << '|' << fusion_mode << '|'
       << train.batch_size << ',' << train.learning_rate << ',' << train.epochs << ','
       << train.beta1 << ',' << train.beta2 << ',' << train.epsilon << ',' << train.seed << ','
       << train.tbptt_horizon << '|';
    for (int i = 0; i < 6; ++i) os << pose_weights.w[i] << ',';
    for (double L : metric_lengths) os << L << ',';
    for (const auto& s : train_scenarios) os << s.name << ':' << s.config.seed << ';';
    return fnv1a(os.str());
}

RunConfig default_run_config() {
    RunConfig rc;
    rc.train.seed = rc.seed;
    const char* weathers[] = {"sunny", "overcast", "cloudy", "rainy", "snowing"};
    std::uint64_t seed = 100;
    for (const char* w : weathers) {
        RunConfig::Scenario s;
        s.name = std::string("train_") + w;
        s.config.seed = seed++;
        s.config.weather = w;
        s.config.n_keypoints = rc.dims.n_keypoints;
        s.config.descriptor_dim = rc.dims.descriptor_dim;
        s.config.image_h = rc.dims.image_h;
        s.config.image_w = rc.dims.image_w;
        rc.train_scenarios.push_back(s);
    }
    seed = 200;
    for (const char* w : weathers) {
        RunConfig::Scenario s;
        s.name = std::string("eval_") + w;
        s.config.seed = seed++;
        s.config.weather = w;
        s.config.n_keypoints = rc.dims.n_keypoints;
        s.config.descriptor_dim = rc.dims.descriptor_dim;
        s.config.image_h = rc.dims.image_h;
        s.config.image_w = rc.dims.image_w;
        rc.eval_scenarios.push_back(s);
    }
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config file: " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw config_error("config parse error in " + path.string() + ": " + e.what());
    }
    reject_unknown(j,
                   {"seed", "dims", "fusion_mode", "train", "pose_weights", "metric_lengths",
                    "train_scenarios", "eval_scenarios", "paths"},
                   "top level");
    RunConfig rc;
    rc.train_scenarios.clear();
    rc.eval_scenarios.clear();
    maybe(j, "seed", rc.seed);
    rc.train.seed = rc.seed;
    if (j.contains("dims")) {
        const auto& d = j.at("dims");
        reject_unknown(d,
                       {"n_keypoints", "descriptor_dim", "f_m", "f_v", "f_i", "hidden", "image_h",
                        "image_w", "match_temperature"},
                       "dims");
        maybe(d, "n_keypoints", rc.dims.n_keypoints);
        maybe(d, "descriptor_dim", rc.dims.descriptor_dim);
        maybe(d, "f_m", rc.dims.f_m);
        maybe(d, "f_v", rc.dims.f_v);
        maybe(d, "f_i", rc.dims.f_i);
        maybe(d, "hidden", rc.dims.hidden);
        maybe(d, "image_h", rc.dims.image_h);
        maybe(d, "image_w", rc.dims.image_w);
        maybe(d, "match_temperature", rc.dims.match_temperature);
    }
    maybe(j, "fusion_mode", rc.fusion_mode);
    if (j.contains("train")) {
        const auto& t = j.at("train");
        reject_unknown(t,
                       {"batch_size", "learning_rate", "epochs", "beta1", "beta2", "epsilon",
                        "seed", "tbptt_horizon", "precision"},
                       "train");
        maybe(t, "batch_size", rc.train.batch_size);
        maybe(t, "learning_rate", rc.train.learning_rate);
        maybe(t, "epochs", rc.train.epochs);
        maybe(t, "beta1", rc.train.beta1);
        maybe(t, "beta2", rc.train.beta2);
        maybe(t, "epsilon", rc.train.epsilon);
        maybe(t, "seed", rc.train.seed);
        maybe(t, "tbptt_horizon", rc.train.tbptt_horizon);
        maybe(t, "precision", rc.train.precision);
    }
    if (j.contains("pose_weights")) {
        const auto& w = j.at("pose_weights");
        reject_unknown(w, {"dx", "dy", "dz", "droll", "dpitch", "dyaw", "lambda"}, "pose_weights");
        maybe(w, "dx", rc.pose_weights.w[0]);
        maybe(w, "dy", rc.pose_weights.w[1]);
        maybe(w, "dz", rc.pose_weights.w[2]);
        maybe(w, "droll", rc.pose_weights.w[3]);
        maybe(w, "dpitch", rc.pose_weights.w[4]);
        maybe(w, "dyaw", rc.pose_weights.w[5]);
        maybe(w, "lambda", rc.pose_weights.lambda);
    }
    if (j.contains("metric_lengths")) {
        rc.metric_lengths = j.at("metric_lengths").get<std::vector<double>>();
    }
    if (j.contains("train_scenarios"))
        rc.train_scenarios = parse_scenarios(j.at("train_scenarios"), rc, "train_scenarios");
    if (j.contains("eval_scenarios"))
        rc.eval_scenarios = parse_scenarios(j.at("eval_scenarios"), rc, "eval_scenarios");
    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        reject_unknown(p, {"scenes_dir", "checkpoint", "reports_dir"}, "paths");
        if (p.contains("scenes_dir")) rc.scenes_dir = p.at("scenes_dir").get<std::string>();
        if (p.contains("checkpoint")) rc.checkpoint_path = p.at("checkpoint").get<std::string>();
        if (p.contains("reports_dir")) rc.reports_dir = p.at("reports_dir").get<std::string>();
    }
    rc.validate();
    return rc;
}

}  // namespace raci
