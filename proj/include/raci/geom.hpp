#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

namespace raci::geom {

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Frame-to-frame 6-DoF motion (dx, dy, dz in meters; droll, dpitch, dyaw
/// in radians, each in (-pi, pi]).
struct RelativePose {
    double dx = 0.0, dy = 0.0, dz = 0.0;
    double droll = 0.0, dpitch = 0.0, dyaw = 0.0;

    Vector6d vec() const {
        Vector6d v;
        v << dx, dy, dz, droll, dpitch, dyaw;
        return v;
    }
    static RelativePose from_vec(const Vector6d& v) {
        return RelativePose{v[0], v[1], v[2], v[3], v[4], v[5]};
    }
};

/// Global pose: translation plus orthonormal rotation (det = 1).
struct AbsolutePose {
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

    static AbsolutePose identity() { return {}; }
};

struct Trajectory {
    std::vector<AbsolutePose> poses;
    std::vector<double> timestamps;           // strictly increasing, seconds
    std::vector<double> cumulative_arclength; // starts at 0, non-decreasing
};

struct EulerAngles {
    double droll = 0.0, dpitch = 0.0, dyaw = 0.0;
    bool gimbal_lock = false;
};

/// Intrinsic Z-Y-X (yaw-pitch-roll) convention: Rz(dyaw)*Ry(dpitch)*Rx(droll).
Eigen::Matrix3d euler_to_rotation(double droll, double dpitch, double dyaw);

/// Inverse of euler_to_rotation. In the gimbal-lock region (|dpitch| within
/// 1e-6 of pi/2) the result is flagged, droll is set to 0 and dyaw carries
/// the recoverable combination (dyaw - droll at +pi/2, dyaw + droll at -pi/2).
EulerAngles rotation_to_euler(const Eigen::Matrix3d& R);

AbsolutePose compose(const AbsolutePose& global, const RelativePose& rel);

/// pose[0] = identity, pose[k+1] = compose(pose[k], rels[k]).
/// Requires |timestamps| = |rels| + 1.
Trajectory compose_trajectory(const std::vector<RelativePose>& rels,
                              const std::vector<double>& timestamps);

/// Inverse of compose: compose(a, relative_between(a, b)) == b.
RelativePose relative_between(const AbsolutePose& a, const AbsolutePose& b);

/// One line per pose: "timestamp tx ty tz r00 r01 r02 r10 ... r22".
void write_trajectory(std::ostream& os, const Trajectory& traj);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace raci::geom
