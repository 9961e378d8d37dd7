#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsd {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point2& a, const Point2& b);

enum class Hypothesis { kH0, kH1 };

const char* to_string(Hypothesis h);

/// L x N matrix of normalized energy samples z_k(l) for one trial.
///
/// Stored node-major: each node's L slots are contiguous, so a node can be
/// handed its own column without copying. This also fixes the summation
/// order used by every statistic (node-major, then slot-major).
class MeasurementBlock {
 public:
  MeasurementBlock() = default;
  MeasurementBlock(std::size_t n_slots, std::size_t n_nodes,
                   Hypothesis label = Hypothesis::kH0);

  std::size_t n_slots() const { return n_slots_; }
  std::size_t n_nodes() const { return n_nodes_; }
  Hypothesis label() const { return label_; }
  void set_label(Hypothesis h) { label_ = h; }

  double operator()(std::size_t slot, std::size_t node) const {
    return data_[node * n_slots_ + slot];
  }
  double& operator()(std::size_t slot, std::size_t node) {
    return data_[node * n_slots_ + slot];
  }

  std::span<const double> column(std::size_t node) const {
    return {data_.data() + node * n_slots_, n_slots_};
  }
  std::span<double> column(std::size_t node) {
    return {data_.data() + node * n_slots_, n_slots_};
  }

  /// Copy of slot l across nodes (z_l).
  std::vector<double> row(std::size_t slot) const;

 private:
  std::size_t n_slots_ = 0;
  std::size_t n_nodes_ = 0;
  Hypothesis label_ = Hypothesis::kH0;
  std::vector<double> data_;
};

/// Small dense row-major square matrix; N is at most a few tens here.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  static DenseMatrix identity(std::size_t n, double scale = 1.0) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
    return m;
  }

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Raised when a precondition on a domain value is violated.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dsd
