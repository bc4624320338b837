#include "raci/params.hpp"

#include <stdexcept>

namespace raci {

Eigen::MatrixXd& ParameterSet::add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    if (index_.count(name)) throw std::invalid_argument("ParameterSet: duplicate name " + name);
    index_[name] = entries_.size();
    entries_.push_back({name, Eigen::MatrixXd::Zero(rows, cols)});
    return entries_.back().value;
}

Eigen::MatrixXd& ParameterSet::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("ParameterSet: unknown name " + name);
    return entries_[it->second].value;
}

const Eigen::MatrixXd& ParameterSet::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("ParameterSet: unknown name " + name);
    return entries_[it->second].value;
}

std::size_t ParameterSet::scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += static_cast<std::size_t>(e.value.size());
    return n;
}

ParameterSet ParameterSet::zeros_like() const {
    ParameterSet out;
    for (const auto& e : entries_) out.add(e.name, e.value.rows(), e.value.cols());
    return out;
}

void ParameterSet::set_zero() {
    for (auto& e : entries_) e.value.setZero();
}

void ParameterSet::axpy(double alpha, const ParameterSet& other) {
    if (other.entries_.size() != entries_.size())
        throw std::invalid_argument("ParameterSet::axpy: layout mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i].value += alpha * other.entries_[i].value;
    }
}

void ParameterSet::scale(double alpha) {
    for (auto& e : entries_) e.value *= alpha;
}

Eigen::VectorXd ParameterSet::flatten() const {
    Eigen::VectorXd v(scalar_count());
    Eigen::Index off = 0;
    for (const auto& e : entries_) {
        v.segment(off, e.value.size()) = Eigen::Map<const Eigen::VectorXd>(e.value.data(), e.value.size());
        off += e.value.size();
    }
    return v;
}

void ParameterSet::unflatten(const Eigen::VectorXd& v) {
    if (v.size() != static_cast<Eigen::Index>(scalar_count()))
        throw std::invalid_argument("ParameterSet::unflatten: size mismatch");
    Eigen::Index off = 0;
    for (auto& e : entries_) {
        Eigen::Map<Eigen::VectorXd>(e.value.data(), e.value.size()) = v.segment(off, e.value.size());
        off += e.value.size();
    }
}

}  // namespace raci
