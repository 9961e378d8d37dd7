#pragma once

#include <span>
#include <vector>

#include "dsd/types.hpp"

namespace dsd {

/// Empirical first and second moments of one node's L samples.
struct LocalMoments {
  double mean = 0.0;           // m_k
  double second_moment = 0.0;  // p_k
};

/// Admissible region for SNR estimates.
///
/// kNonNegative projects onto c >= 0 (a power ratio). kUnconstrained keeps the
/// stationary point of the local likelihood even when it is slightly negative;
/// this is what the chi-square null law of 2 log T_L assumes, since c = 0 is
/// then an interior point. Estimates are still floored at -1/2 + 1e-9 so that
/// 1 + 2c stays positive.
enum class EstimateDomain { kNonNegative, kUnconstrained };

inline constexpr double kUnconstrainedFloor = -0.5 + 1e-9;

double lower_bound(EstimateDomain domain);

LocalMoments local_moments(std::span<const double> column);

/// Positive-branch root of c^2 + (M + 2 + sqrt(M) m) c - (p + sqrt(M) m - 1) = 0,
/// i.e. the stationary point of the marginal likelihood N(sqrt(M) c, (1 + c)^2).
/// May be negative. Throws DomainError on a negative discriminant.
double local_mle_root(const LocalMoments& moments, int time_bandwidth);

/// Local MLE of c_k from node k's own moments, projected onto `domain`.
double local_mle(const LocalMoments& moments, int time_bandwidth,
                 EstimateDomain domain = EstimateDomain::kNonNegative);

/// Column-wise local_mle; entry k depends on column k only.
std::vector<double> local_mle_vector(const MeasurementBlock& block, int time_bandwidth,
                                     EstimateDomain domain = EstimateDomain::kNonNegative);

struct GlobalMleOptions {
  int max_iterations = 10000;
  double gradient_tolerance = 1e-8;
  EstimateDomain domain = EstimateDomain::kNonNegative;
};

struct GlobalMleResult {
  std::vector<double> estimate;
  double objective = 0.0;  // log p(z; estimate) - log p(z; 0)
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;  // false: cap hit, `estimate` is the best iterate
};

/// Numerical maximizer of the joint H1 log-likelihood by projected gradient
/// ascent (Barzilai-Borwein step, Armijo backtracking), started at the local MLE.
GlobalMleResult global_mle_numeric(const MeasurementBlock& block, int time_bandwidth,
                                   const GlobalMleOptions& options = {});

/// log p(z; c) - log p(z; 0) for the whole block, in the Woodbury / determinant
/// lemma factored form; O(N L).
double log_likelihood_ratio(const MeasurementBlock& block, std::span<const double> c,
                            int time_bandwidth);

/// Analytic gradient of log_likelihood_ratio with respect to c.
std::vector<double> log_likelihood_gradient(const MeasurementBlock& block,
                                            std::span<const double> c,
                                            int time_bandwidth);

/// Score of the joint density p(z_l; theta) for one slot z_l.
std::vector<double> joint_score(std::span<const double> z, std::span<const double> theta,
                                int time_bandwidth);

/// Score of node k's marginal N(sqrt(M) c_k, (1 + c_k)^2) at one sample.
double local_score(double z, double c, int time_bandwidth);

/// Fisher information of the joint model at theta = 0: (M + 2) I_N.
DenseMatrix fisher_at_zero(int n_nodes, int time_bandwidth);

/// Local Fisher matrix E[psi_i psi_j] of the per-node marginal scores under c.
DenseMatrix local_fisher(std::span<const double> c, int time_bandwidth);

}  // namespace dsd
