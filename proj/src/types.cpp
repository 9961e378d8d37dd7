#include "dsd/types.hpp"

#include <cmath>

namespace dsd {

double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

const char* to_string(Hypothesis h) {
  return h == Hypothesis::kH0 ? "H0" : "H1";
}

MeasurementBlock::MeasurementBlock(std::size_t n_slots, std::size_t n_nodes,
                                   Hypothesis label)
    : n_slots_(n_slots), n_nodes_(n_nodes), label_(label),
      data_(n_slots * n_nodes, 0.0) {}

std::vector<double> MeasurementBlock::row(std::size_t slot) const {
  std::vector<double> out(n_nodes_);
  for (std::size_t k = 0; k < n_nodes_; ++k) out[k] = (*this)(slot, k);
  return out;
}

}  // namespace dsd
