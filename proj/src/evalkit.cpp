#include "raci/evalkit.hpp"

#include "raci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace raci::evalkit {

namespace {

double rotation_angle_deg(const Eigen::Matrix3d& R) {
    const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
    return std::acos(c) * 180.0 / M_PI;
}

}  // namespace

std::vector<DriftSample> kitti_drift(const geom::Trajectory& gt, const geom::Trajectory& pred,
                                     const std::vector<double>& lengths) {
    const std::size_t n = gt.poses.size();
    if (pred.poses.size() != n)
        throw std::invalid_argument("kitti_drift: trajectories have different lengths");
    std::vector<DriftSample> samples;
    const auto& arc = gt.cumulative_arclength;
    for (std::size_t start = 0; start < n; ++start) {
        for (double L : lengths) {
            // First pose at least L meters of gt arclength ahead.
            auto it = std::lower_bound(arc.begin() + static_cast<std::ptrdiff_t>(start),
                                       arc.end(), arc[start] + L);
            if (it == arc.end()) continue;
            const auto end = static_cast<std::size_t>(it - arc.begin());
            geom::AbsolutePose gt_rel{
                gt.poses[start].rotation.transpose() *
                    (gt.poses[end].translation - gt.poses[start].translation),
                gt.poses[start].rotation.transpose() * gt.poses[end].rotation};
            geom::AbsolutePose pred_rel{
                pred.poses[start].rotation.transpose() *
                    (pred.poses[end].translation - pred.poses[start].translation),
                pred.poses[start].rotation.transpose() * pred.poses[end].rotation};
            // E = gt_rel^-1 * pred_rel.
            Eigen::Matrix3d R_err = gt_rel.rotation.transpose() * pred_rel.rotation;
            Eigen::Vector3d t_err_vec =
                gt_rel.rotation.transpose() * (pred_rel.translation - gt_rel.translation);
            DriftSample s;
            s.start = start;
            s.length = L;
            s.t_err = t_err_vec.norm() / L * 100.0;
            s.r_err = rotation_angle_deg(R_err) / L;
            samples.push_back(s);
        }
    }
    return samples;
}

DriftReport aggregate(const std::vector<TaggedSample>& samples, GroupBy group_by) {
    std::map<std::string, std::pair<Eigen::Vector2d, std::size_t>> groups;
    std::vector<std::string> order;
    for (const auto& ts : samples) {
        std::string key;
        if (group_by == GroupBy::Length) {
            // Integral lengths format cleanly; keep one decimal otherwise.
            const double L = ts.sample.length;
            char buf[32];
            if (L == std::floor(L)) {
                std::snprintf(buf, sizeof(buf), "%.0fm", L);
            } else {
                std::snprintf(buf, sizeof(buf), "%.1fm", L);
            }
            key = buf;
        } else {
            key = ts.weather;
        }
        auto [it, inserted] = groups.try_emplace(key, Eigen::Vector2d::Zero(), 0);
        if (inserted) order.push_back(key);
        it->second.first += Eigen::Vector2d(ts.sample.t_err, ts.sample.r_err);
        it->second.second += 1;
    }
    DriftReport report;
    double sum_t = 0.0, sum_r = 0.0;
    for (const auto& key : order) {
        const auto& [acc, count] = groups.at(key);
        DriftReport::Row row;
        row.group = key;
        row.t_err = acc.x() / static_cast<double>(count);
        row.r_err_per_m = acc.y() / static_cast<double>(count);
        row.samples = count;
        report.rows.push_back(row);
        sum_t += row.t_err;
        sum_r += row.r_err_per_m;
    }
    if (!report.rows.empty()) {
        report.avg_t_err = sum_t / static_cast<double>(report.rows.size());
        report.avg_r_err_per_m = sum_r / static_cast<double>(report.rows.size());
    }
    return report;
}

void write_report_csv(const std::filesystem::path& path, const DriftReport& report) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw data_error("cannot open report CSV for writing: " + path.string());
    os << "group,t_err_pct,r_err_deg_per_100m,samples\n";
    os.precision(10);
    for (const auto& row : report.rows) {
        os << row.group << ',' << row.t_err << ',' << row.r_err_per_m * 100.0 << ','
           << row.samples << '\n';
    }
    os << "Avg," << report.avg_t_err << ',' << report.avg_r_err_per_m * 100.0 << ",-\n";
}

geom::Trajectory predict_trajectory(const Scene& scene, const Model& model,
                                    const ParameterSet& params,
                                    const head::PoseWeights& weights) {
    std::vector<geom::RelativePose> rels;
    rels.reserve(scene.frames.size());
    auto state = model.initial_state();
    for (const auto& frame : scene.frames) {
        model.validate_frame(frame);
        auto res = model.forward_frame(frame, params, state, weights);
        state = res.state;
        rels.push_back(res.pred);
    }
    return geom::compose_trajectory(rels, scene.gt_trajectory.timestamps);
}

std::vector<TaggedSample> evaluate_scenes(const std::vector<Scene>& scenes, const Model& model,
                                          const ParameterSet& params,
                                          const head::PoseWeights& weights,
                                          const std::vector<double>& lengths) {
    std::vector<TaggedSample> out;
    for (const auto& scene : scenes) {
        geom::Trajectory pred = predict_trajectory(scene, model, params, weights);
        for (const auto& s : kitti_drift(scene.gt_trajectory, pred, lengths)) {
            out.push_back({s, scene.name, scene.config.weather});
        }
    }
    return out;
}

}  // namespace raci::evalkit
