#pragma once

#include <span>

#include "dsd/types.hpp"

// Slow dense-matrix evaluations kept as cross-checks for the factored code.
namespace dsd::reference {

/// -(L/2) log det Sigma + 1/2 sum_l (|z_l|^2 - |Sigma^{-1/2}(z_l - mu)|^2) with
/// Sigma = c c^T + 2 diag(c) + I and mu = sqrt(M) c, via a Cholesky factor.
double dense_log_likelihood_ratio(const MeasurementBlock& block, std::span<const double> c,
                                  int time_bandwidth);

}  // namespace dsd::reference
