#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace raci {

/// Named flat collection of trainable tensors with a stable ordering.
/// Vectors are stored as n x 1 matrices. Gradients and Adam moments reuse
/// the same container shape-for-shape.
class ParameterSet {
public:
    struct Entry {
        std::string name;
        Eigen::MatrixXd value;
    };

    Eigen::MatrixXd& add(const std::string& name, Eigen::Index rows, Eigen::Index cols);

    Eigen::MatrixXd& at(const std::string& name);
    const Eigen::MatrixXd& at(const std::string& name) const;
    bool has(const std::string& name) const { return index_.count(name) != 0; }

    std::size_t size() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }
    std::vector<Entry>& entries() { return entries_; }

    /// Total scalar count across all tensors.
    std::size_t scalar_count() const;

    /// Same names/shapes, all zeros.
    ParameterSet zeros_like() const;

    void set_zero();
    /// this += alpha * other (entry-wise over matching layout).
    void axpy(double alpha, const ParameterSet& other);
    void scale(double alpha);

    /// Flatten to / restore from one vector in entry order (used by the
    /// finite-difference checker and the checkpoint format).
    Eigen::VectorXd flatten() const;
    void unflatten(const Eigen::VectorXd& v);

private:
    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> index_;
};

}  // namespace raci
