#pragma once

#include <span>
#include <vector>

#include "dsd/types.hpp"

namespace dsd {

/// Per-node terms whose network-wide sums build the fully distributed statistic.
struct GlrSummands {
  std::vector<double> c1_terms;  // c^2 / (1 + 2c)
  std::vector<double> c2_terms;  // log(1 + 2c)
  std::vector<double> u_terms;   // sum_l z^2 - (z - sqrt(M) c)^2 / (1 + 2c)
  std::vector<double> w_terms;   // (m - sqrt(M) c) c / (1 + 2c)
};

/// The four network-wide sums.
struct GlrAggregates {
  double c1 = 0.0;
  double c2 = 0.0;
  double u = 0.0;
  double w = 0.0;
};

/// Central (noncentrality = 0) or noncentral chi-square law of 2 log T.
struct AsymptoticLaw {
  int dof = 1;
  double noncentrality = 0.0;

  double cdf(double x) const;
};

/// Terms for node k use only column k and estimate k. Estimates must satisfy
/// 1 + 2c > 0.
GlrSummands glr_summands(const MeasurementBlock& block, std::span<const double> estimates,
                         int time_bandwidth);

/// Sums of the summands in node order.
GlrAggregates aggregate(const GlrSummands& summands);

/// log T_L: exact factored GLR with the local estimates plugged in. The
/// cross term is summed over slots outside the square.
double log_glr_local(const MeasurementBlock& block, std::span<const double> estimates,
                     int time_bandwidth);

/// T_{L-FD} = -(L/2)(log(1 + c1) + c2) + u/2 + L w^2 / (2 (1 + c1)).
double fd_statistic(double c1_bar, double c2_bar, double u_bar, double w_bar, int n_slots);
double fd_statistic(const GlrAggregates& agg, int n_slots);

/// Clairvoyant log-likelihood ratio with the true SNR vector.
double lr_oracle(const MeasurementBlock& block, std::span<const double> true_c,
                 int time_bandwidth);

/// P(chi2_dof <= x).
double chi2_cdf(double x, int dof);

/// x with chi2_cdf(x, dof) = prob, by bracketed bisection to 1e-14 relative
/// in x; above prob = 0.5 the upper tail is matched instead. prob in (0, 1).
double chi2_quantile(double prob, int dof);

/// Poisson(lambda/2) mixture of central chi-square CDFs, truncated once the
/// untouched Poisson mass falls below 1e-12.
double noncentral_chi2_cdf(double x, int dof, double lambda);

struct RocPoint {
  double pfa = 0.0;
  double pd = 0.0;
};

/// Asymptotic ROC: gamma from the central quantile at 1 - Pfa, Pd from the
/// noncentral tail. Thresholds are in the 2 log T scale.
std::vector<RocPoint> asymptotic_roc(int dof, double lambda, std::span<const double> pfa_grid);

}  // namespace dsd
