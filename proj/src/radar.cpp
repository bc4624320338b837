#include "raci/radar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace raci::radar {

MatchResult softmax_match(const KeypointFrame& frame_a, const KeypointFrame& frame_b,
                          double temperature) {
    if (!(temperature > 0.0)) throw std::invalid_argument("softmax_match: temperature must be > 0");
    const auto n = static_cast<Eigen::Index>(frame_a.keypoints.size());
    if (frame_b.keypoints.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("softmax_match: frame sizes differ");
    if (n == 0) throw std::invalid_argument("softmax_match: empty frames");
    const auto d = frame_a.keypoints[0].descriptor.size();

    MatchResult out;
    out.weights.resize(n, n);
    out.matched_xy.resize(n, 2);
    out.matched_desc.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd logits(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            logits[j] = frame_a.keypoints[i].descriptor.dot(frame_b.keypoints[j].descriptor) / temperature;
        }
        const double m = logits.maxCoeff();
        Eigen::VectorXd w = (logits.array() - m).exp();
        w /= w.sum();
        out.weights.row(i) = w.transpose();

        Eigen::Vector2d loc = Eigen::Vector2d::Zero();
        Eigen::VectorXd desc = Eigen::VectorXd::Zero(d);
        for (Eigen::Index j = 0; j < n; ++j) {
            loc.x() += w[j] * frame_b.keypoints[j].x;
            loc.y() += w[j] * frame_b.keypoints[j].y;
            desc += w[j] * frame_b.keypoints[j].descriptor;
        }
        const double norm = desc.norm();
        if (norm > 1e-12) desc /= norm;
        out.matched_xy.row(i) = loc.transpose();
        out.matched_desc.row(i) = desc.transpose();
    }
    return out;
}

DeltaMatrix build_delta_matrix(const KeypointFrame& frame_a, const KeypointFrame& frame_b,
                               const MatchResult& match) {
    (void)frame_b;
    const auto n = static_cast<Eigen::Index>(frame_a.keypoints.size());
    if (match.matched_xy.rows() != n)
        throw std::invalid_argument("build_delta_matrix: match rows not aligned with frame_a");
    DeltaMatrix A;
    A.rows.resize(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& kp = frame_a.keypoints[i];
        const double dx = match.matched_xy(i, 0) - kp.x;
        const double dy = match.matched_xy(i, 1) - kp.y;
        const double dtheta = (dx == 0.0 && dy == 0.0) ? 0.0 : std::atan2(dy, dx);
        const double ddesc = 1.0 - kp.descriptor.dot(match.matched_desc.row(i).transpose());
        A.rows(i, 0) = ddesc;
        A.rows(i, 1) = dx;
        A.rows(i, 2) = dy;
        A.rows(i, 3) = dtheta;
    }
    return A;
}

Eigen::VectorXd flatten_delta(const DeltaMatrix& A) {
    const auto n = A.rows.rows();
    Eigen::VectorXd v(n * 4);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < 4; ++c) v[i * 4 + c] = A.rows(i, c);
    return v;
}

Eigen::VectorXd radar_encode(const DeltaMatrix& A, const Eigen::MatrixXd& W,
                             const Eigen::VectorXd& b) {
    Eigen::VectorXd flat = flatten_delta(A);
    if (W.cols() != flat.size() || W.rows() != b.size())
        throw std::invalid_argument("radar_encode: parameter shape mismatch");
    return W * flat + b;
}

KeypointFrame fit_to_count(KeypointFrame frame, int n, int descriptor_dim) {
    if (static_cast<int>(frame.keypoints.size()) > n) {
        std::stable_sort(frame.keypoints.begin(), frame.keypoints.end(),
                         [](const Keypoint& a, const Keypoint& b) { return a.score > b.score; });
        frame.keypoints.resize(n);
    }
    while (static_cast<int>(frame.keypoints.size()) < n) {
        Keypoint pad;
        pad.descriptor = Eigen::VectorXd::Zero(descriptor_dim);
        frame.keypoints.push_back(pad);
    }
    return frame;
}

}  // namespace raci::radar
