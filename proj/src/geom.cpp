#include "raci/geom.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace raci::geom {

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

Eigen::Matrix3d euler_to_rotation(double droll, double dpitch, double dyaw) {
    if (!std::isfinite(droll) || !std::isfinite(dpitch) || !std::isfinite(dyaw)) {
        throw std::invalid_argument("euler_to_rotation: non-finite angle");
    }
    const double cr = std::cos(droll), sr = std::sin(droll);
    const double cp = std::cos(dpitch), sp = std::sin(dpitch);
    const double cy = std::cos(dyaw), sy = std::sin(dyaw);
    Eigen::Matrix3d R;
    // Rz(yaw) * Ry(pitch) * Rx(roll), expanded.
    R << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
         sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
         -sp,     cp * sr,                cp * cr;
    return R;
}

EulerAngles rotation_to_euler(const Eigen::Matrix3d& R) {
    Eigen::Matrix3d E = R.transpose() * R - Eigen::Matrix3d::Identity();
    if (E.cwiseAbs().maxCoeff() > 1e-6) {
        throw std::invalid_argument("rotation_to_euler: matrix not orthonormal");
    }
    EulerAngles e;
    const double sp = std::clamp(-R(2, 0), -1.0, 1.0);
    e.dpitch = std::asin(sp);
    if (M_PI / 2.0 - std::abs(e.dpitch) < 1e-6) {
        e.gimbal_lock = true;
        e.droll = 0.0;
        // At +pi/2 only (dyaw - droll) is observable; at -pi/2 only
        // (dyaw + droll). Both land in dyaw with droll pinned to 0.
        if (e.dpitch > 0.0) {
            e.dyaw = std::atan2(R(1, 2), R(1, 1));
        } else {
            e.dyaw = std::atan2(-R(1, 2), R(1, 1));
        }
    } else {
        e.droll = std::atan2(R(2, 1), R(2, 2));
        e.dyaw = std::atan2(R(1, 0), R(0, 0));
    }
    return e;
}

AbsolutePose compose(const AbsolutePose& global, const RelativePose& rel) {
    AbsolutePose out;
    Eigen::Vector3d t(rel.dx, rel.dy, rel.dz);
    out.translation = global.translation + global.rotation * t;
    out.rotation = global.rotation * euler_to_rotation(rel.droll, rel.dpitch, rel.dyaw);
    return out;
}

Trajectory compose_trajectory(const std::vector<RelativePose>& rels,
                              const std::vector<double>& timestamps) {
    if (timestamps.size() != rels.size() + 1) {
        throw std::invalid_argument("compose_trajectory: |timestamps| must equal |rels|+1");
    }
    Trajectory traj;
    traj.poses.reserve(rels.size() + 1);
    traj.poses.push_back(AbsolutePose::identity());
    traj.timestamps = timestamps;
    traj.cumulative_arclength.reserve(rels.size() + 1);
    traj.cumulative_arclength.push_back(0.0);
    for (const auto& rel : rels) {
        traj.poses.push_back(compose(traj.poses.back(), rel));
        const double step = std::sqrt(rel.dx * rel.dx + rel.dy * rel.dy + rel.dz * rel.dz);
        traj.cumulative_arclength.push_back(traj.cumulative_arclength.back() + step);
    }
    return traj;
}

RelativePose relative_between(const AbsolutePose& a, const AbsolutePose& b) {
    Eigen::Matrix3d R_rel = a.rotation.transpose() * b.rotation;
    Eigen::Vector3d t_rel = a.rotation.transpose() * (b.translation - a.translation);
    EulerAngles e = rotation_to_euler(R_rel);
    return RelativePose{t_rel.x(), t_rel.y(), t_rel.z(), e.droll, e.dpitch, e.dyaw};
}

void write_trajectory(std::ostream& os, const Trajectory& traj) {
    os.precision(17);
    for (std::size_t i = 0; i < traj.poses.size(); ++i) {
        const auto& p = traj.poses[i];
        os << traj.timestamps[i] << ' ' << p.translation.x() << ' '
           << p.translation.y() << ' ' << p.translation.z();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) os << ' ' << p.rotation(r, c);
        os << '\n';
    }
}

}  // namespace raci::geom
