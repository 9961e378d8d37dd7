#include "dsd/reference.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace dsd::reference {

double dense_log_likelihood_ratio(const MeasurementBlock& block, std::span<const double> c,
                                  int time_bandwidth) {
  const auto n = static_cast<Eigen::Index>(block.n_nodes());
  if (static_cast<Eigen::Index>(c.size()) != n) throw DomainError("dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> cv(c.data(), n);
  const Eigen::MatrixXd sigma = cv * cv.transpose() +
                                Eigen::MatrixXd((2.0 * cv.array() + 1.0).matrix().asDiagonal());
  const Eigen::VectorXd mu = std::sqrt(static_cast<double>(time_bandwidth)) * cv;
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw DomainError("covariance not positive definite");
  const Eigen::MatrixXd lower = llt.matrixL();
  const double log_det = 2.0 * lower.diagonal().array().log().sum();

  double quad = 0.0;
  Eigen::VectorXd z(n);
  for (std::size_t l = 0; l < block.n_slots(); ++l) {
    for (Eigen::Index k = 0; k < n; ++k) z(k) = block(l, static_cast<std::size_t>(k));
    const Eigen::VectorXd white = llt.matrixL().solve(z - mu);
    quad += z.squaredNorm() - white.squaredNorm();
  }
  return -0.5 * static_cast<double>(block.n_slots()) * log_det + 0.5 * quad;
}

}  // namespace dsd::reference
