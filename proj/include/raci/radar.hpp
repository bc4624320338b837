#pragma once

#include <Eigen/Core>
#include <vector>

namespace raci::radar {

/// One radar keypoint: planar location in the ego frame, detection score,
/// unit-norm descriptor.
struct Keypoint {
    double x = 0.0, y = 0.0;
    double score = 0.0;  // in [0, 1]
    Eigen::VectorXd descriptor;
};

struct KeypointFrame {
    std::vector<Keypoint> keypoints;  // exactly N per configured run
    double timestamp = 0.0;
};

/// Soft association of frame_a keypoints against frame_b.
struct MatchResult {
    Eigen::MatrixXd weights;       // N x N, rows are probability distributions
    Eigen::MatrixXd matched_xy;    // N x 2 expected locations in frame_b
    Eigen::MatrixXd matched_desc;  // N x D, renormalized to unit length
};

/// Per-keypoint rows of (ddesc, dx, dy, dtheta). ddesc = 1 - cosine
/// similarity against the matched descriptor; dtheta = atan2(dy, dx),
/// defined as 0 at zero displacement.
struct DeltaMatrix {
    Eigen::MatrixXd rows;  // N x 4
};

/// w_ij = softmax_j(<desc_a_i, desc_b_j> / temperature); matched location
/// and descriptor are the weighted averages over frame_b (descriptor
/// renormalized to unit length).
MatchResult softmax_match(const KeypointFrame& frame_a, const KeypointFrame& frame_b,
                          double temperature);

DeltaMatrix build_delta_matrix(const KeypointFrame& frame_a, const KeypointFrame& frame_b,
                               const MatchResult& match);

/// Row-major flatten of the N x 4 delta matrix (row i contiguous).
Eigen::VectorXd flatten_delta(const DeltaMatrix& A);

/// z_M = W * flatten(A) + b. W is (F_M x 4N).
Eigen::VectorXd radar_encode(const DeltaMatrix& A, const Eigen::MatrixXd& W,
                             const Eigen::VectorXd& b);

/// Truncates to the N highest-scoring keypoints or pads with zero-score
/// origin keypoints carrying zero descriptors of dimension D.
KeypointFrame fit_to_count(KeypointFrame frame, int n, int descriptor_dim);

}  // namespace raci::radar
