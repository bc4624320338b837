// Command-line surface: generate | train | eval | masks | export-traj.
// All commands are driven by one JSON config file; flags override fields.
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.

#include "raci/config.hpp"
#include "raci/errors.hpp"
#include "raci/evalkit.hpp"
#include "raci/learn.hpp"
#include "raci/sceneio.hpp"
#include "raci/synthsim.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using namespace raci;

int log_level() {
    const char* env = std::getenv("RACI_LOG");
    if (!env) return 1;
    return std::atoi(env);
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << msg << '\n';
}

RunConfig load_config(const std::string& config_path) {
    RunConfig rc = config_path.empty() ? default_run_config() : load_run_config(config_path);
    rc.validate();
    return rc;
}

std::vector<Scene> load_scene_set(const RunConfig& rc,
                                  const std::vector<RunConfig::Scenario>& scenarios) {
    std::vector<Scene> scenes;
    for (const auto& s : scenarios) {
        scenes.push_back(sceneio::read_scene(rc.scenes_dir / s.name));
    }
    return scenes;
}

int cmd_generate(const RunConfig& rc) {
    auto emit = [&](const RunConfig::Scenario& s) {
        Scene scene = synthsim::generate_scene(s.config, s.name);
        sceneio::write_scene(rc.scenes_dir / s.name, scene);
        std::cout << s.name << ": frames=" << scene.frames.size()
                  << " weather=" << scene.config.weather << " path_length="
                  << scene.gt_trajectory.cumulative_arclength.back() << "m\n";
    };
    for (const auto& s : rc.train_scenarios) emit(s);
    for (const auto& s : rc.eval_scenarios) emit(s);
    return 0;
}

int cmd_train(const RunConfig& rc, const std::string& resume_path) {
    Model model = rc.make_model();
    auto scenes = load_scene_set(rc, rc.train_scenarios);
    learn::Checkpoint resume;
    const learn::Checkpoint* resume_ptr = nullptr;
    if (!resume_path.empty()) {
        resume = learn::load_checkpoint(resume_path);
        if (resume.config_hash != rc.hash())
            throw config_error("resume checkpoint was produced by a different config");
        resume_ptr = &resume;
    }
    learn::Checkpoint last_good;
    learn::TrainResult result;
    try {
        result = learn::train(scenes, model, rc.train, rc.pose_weights, rc.hash(), resume_ptr,
                              &last_good);
    } catch (const numerical_error&) {
        learn::save_checkpoint(rc.checkpoint_path, last_good);
        info("training aborted; last good checkpoint written to " +
             rc.checkpoint_path.string());
        throw;
    }
    learn::save_checkpoint(rc.checkpoint_path, result.checkpoint);
    learn::write_loss_csv(rc.checkpoint_path.string() + ".loss.csv", result.curve);
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
        std::cout << "epoch " << (e + 1) << " loss " << result.epoch_loss[e] << '\n';
    }
    std::cout << "checkpoint: " << rc.checkpoint_path.string() << '\n';
    return 0;
}

int cmd_eval(const RunConfig& rc, const std::string& checkpoint_path,
             const std::string& baseline_path, bool oracle, bool export_trajectories) {
    auto scenes = load_scene_set(rc, rc.eval_scenarios);
    std::filesystem::create_directories(rc.reports_dir);

    std::vector<evalkit::TaggedSample> samples;
    if (oracle) {
        // Ground-truth poses as the predictor: the all-zero report.
        for (const auto& scene : scenes) {
            for (const auto& s :
                 evalkit::kitti_drift(scene.gt_trajectory, scene.gt_trajectory, rc.metric_lengths))
                samples.push_back({s, scene.name, scene.config.weather});
        }
    } else {
        Model model = rc.make_model();
        auto ckpt = learn::load_checkpoint(
            checkpoint_path.empty() ? rc.checkpoint_path.string() : checkpoint_path);
        if (ckpt.params.scalar_count() != model.zero_params().scalar_count())
            throw config_error("checkpoint dimensions do not match the configured model");
        samples = evalkit::evaluate_scenes(scenes, model, ckpt.params, rc.pose_weights,
                                           rc.metric_lengths);
        if (export_trajectories) {
            for (const auto& scene : scenes) {
                auto pred =
                    evalkit::predict_trajectory(scene, model, ckpt.params, rc.pose_weights);
                std::ofstream os(rc.reports_dir / (scene.name + "_pred.traj"));
                geom::write_trajectory(os, pred);
                std::ofstream gs(rc.reports_dir / (scene.name + "_gt.traj"));
                geom::write_trajectory(gs, scene.gt_trajectory);
            }
        }
    }
    auto by_length = evalkit::aggregate(samples, evalkit::GroupBy::Length);
    auto by_weather = evalkit::aggregate(samples, evalkit::GroupBy::Weather);
    evalkit::write_report_csv(rc.reports_dir / "by_length.csv", by_length);
    evalkit::write_report_csv(rc.reports_dir / "by_weather.csv", by_weather);

    if (!baseline_path.empty()) {
        RunConfig base_rc = rc;
        base_rc.fusion_mode = "baseline";
        Model base_model = base_rc.make_model();
        auto base_ckpt = learn::load_checkpoint(baseline_path);
        auto base_samples = evalkit::evaluate_scenes(scenes, base_model, base_ckpt.params,
                                                     rc.pose_weights, rc.metric_lengths);
        evalkit::write_report_csv(rc.reports_dir / "baseline_by_length.csv",
                                  evalkit::aggregate(base_samples, evalkit::GroupBy::Length));
        evalkit::write_report_csv(rc.reports_dir / "baseline_by_weather.csv",
                                  evalkit::aggregate(base_samples, evalkit::GroupBy::Weather));
    }
    std::cout << "avg t_err " << by_length.avg_t_err << "% avg r_err "
              << by_length.avg_r_err_per_m * 100.0 << " deg/100m\n";
    std::cout << "reports in " << rc.reports_dir.string() << '\n';
    return 0;
}

int cmd_masks(const RunConfig& rc, const std::string& checkpoint_path,
              const std::string& scene_name, const std::string& out_path) {
    Model model = rc.make_model();
    auto ckpt = learn::load_checkpoint(
        checkpoint_path.empty() ? rc.checkpoint_path.string() : checkpoint_path);
    Scene scene = sceneio::read_scene(rc.scenes_dir / scene_name);

    std::ofstream os(out_path);
    if (!os) throw data_error("cannot open mask CSV for writing: " + out_path);
    os << "frame,mask,values...\n";
    os.precision(10);
    Eigen::Vector3d mean_sum = Eigen::Vector3d::Zero();  // I, M, V self masks
    Eigen::Vector3d gate_sum = Eigen::Vector3d::Zero();  // I, M, V effective gates
    auto state = model.initial_state();
    auto dump = [&os](std::size_t frame, const char* name, const Eigen::VectorXd& v) {
        os << frame << ',' << name;
        for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << v[i];
        os << '\n';
    };
    for (std::size_t k = 0; k < scene.frames.size(); ++k) {
        auto res = model.forward_frame(scene.frames[k], ckpt.params, state, rc.pose_weights);
        state = res.state;
        dump(k, "self_I", res.masks.self_I);
        dump(k, "self_M", res.masks.self_M);
        dump(k, "self_V", res.masks.self_V);
        dump(k, "cross_I", res.masks.cross_I);
        dump(k, "cross_M", res.masks.cross_M);
        dump(k, "cross_V", res.masks.cross_V);
        mean_sum[0] += res.masks.self_I.mean();
        mean_sum[1] += res.masks.self_M.mean();
        mean_sum[2] += res.masks.self_V.mean();
        gate_sum[0] += (res.masks.self_I.array() * res.masks.cross_I.array()).mean();
        gate_sum[1] += (res.masks.self_M.array() * res.masks.cross_M.array()).mean();
        gate_sum[2] += (res.masks.self_V.array() * res.masks.cross_V.array()).mean();
    }
    const double n = static_cast<double>(scene.frames.size());
    os << "summary,mean_I," << mean_sum[0] / n << '\n';
    os << "summary,mean_M," << mean_sum[1] / n << '\n';
    os << "summary,mean_V," << mean_sum[2] / n << '\n';
    os << "summary,gate_I," << gate_sum[0] / n << '\n';
    os << "summary,gate_M," << gate_sum[1] / n << '\n';
    os << "summary,gate_V," << gate_sum[2] / n << '\n';
    std::cout << "mask CSV: " << out_path << '\n';
    return 0;
}

int cmd_export_traj(const RunConfig& rc, const std::string& scene_name,
                    const std::string& out_path) {
    Scene scene = sceneio::read_scene(rc.scenes_dir / scene_name);
    std::ofstream os(out_path);
    if (!os) throw data_error("cannot open trajectory file for writing: " + out_path);
    geom::write_trajectory(os, scene.gt_trajectory);
    std::cout << "trajectory: " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RaCI-Net desk-scale multi-modal odometry pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON run config (defaults to built-in suite)");

    std::uint64_t seed_override = 0;
    bool has_seed = false;
    auto* seed_opt = app.add_option("--seed", seed_override, "override the run seed");

    auto* gen = app.add_subcommand("generate", "generate the synthetic scene suite");

    auto* train = app.add_subcommand("train", "train a model on the generated scenes");
    std::string resume_path;
    train->add_option("--resume", resume_path, "continue from a checkpoint");
    int epochs_override = 0;
    auto* epochs_opt = train->add_option("--epochs", epochs_override, "override epoch count");
    double lr_override = 0.0;
    auto* lr_opt = train->add_option("--lr", lr_override, "override learning rate");
    std::string fusion_override;
    train->add_option("--fusion", fusion_override,
                      "fusion mode override (two_stage | baseline | literal_eq4)");
    std::string ckpt_override;
    train->add_option("--checkpoint", ckpt_override, "checkpoint output path override");

    auto* eval = app.add_subcommand("eval", "drift reports over the held-out scenes");
    std::string eval_ckpt, baseline_ckpt;
    eval->add_option("--checkpoint", eval_ckpt, "checkpoint to evaluate");
    eval->add_option("--baseline-checkpoint", baseline_ckpt,
                     "additional baseline-mode checkpoint for side-by-side reports");
    bool oracle = false;
    eval->add_flag("--oracle", oracle, "use ground-truth poses as the predictor");
    bool export_traj_flag = false;
    eval->add_flag("--export-traj", export_traj_flag, "also write trajectory files");
    std::string eval_fusion;
    eval->add_option("--fusion", eval_fusion, "fusion mode override");

    auto* masks = app.add_subcommand("masks", "dump attention masks per frame to CSV");
    std::string masks_ckpt, masks_scene, masks_out = "masks.csv";
    masks->add_option("--checkpoint", masks_ckpt, "checkpoint to inspect");
    masks->add_option("--scene", masks_scene, "scene name under scenes_dir")->required();
    masks->add_option("-o,--out", masks_out, "output CSV path");

    auto* exp = app.add_subcommand("export-traj", "export a scene's ground-truth trajectory");
    std::string exp_scene, exp_out = "trajectory.txt";
    exp->add_option("--scene", exp_scene, "scene name under scenes_dir")->required();
    exp->add_option("-o,--out", exp_out, "output path");

    CLI11_PARSE(app, argc, argv);
    has_seed = seed_opt->count() > 0;

    try {
        RunConfig rc = load_config(config_path);
        if (has_seed) {
            rc.seed = seed_override;
            rc.train.seed = seed_override;
        }
        if (*gen) return cmd_generate(rc);
        if (*train) {
            if (epochs_opt->count()) rc.train.epochs = epochs_override;
            if (lr_opt->count()) rc.train.learning_rate = lr_override;
            if (!fusion_override.empty()) rc.fusion_mode = fusion_override;
            if (!ckpt_override.empty()) rc.checkpoint_path = ckpt_override;
            rc.validate();
            return cmd_train(rc, resume_path);
        }
        if (*eval) {
            if (!eval_fusion.empty()) rc.fusion_mode = eval_fusion;
            rc.validate();
            return cmd_eval(rc, eval_ckpt, baseline_ckpt, oracle, export_traj_flag);
        }
        if (*masks) return cmd_masks(rc, masks_ckpt, masks_scene, masks_out);
        if (*exp) return cmd_export_traj(rc, exp_scene, exp_out);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
