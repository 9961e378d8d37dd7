#include "dsd/statistics.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "dsd/estimation.hpp"
#include "dsd/numeric.hpp"

namespace dsd {

double AsymptoticLaw::cdf(double x) const {
  return noncentrality == 0.0 ? chi2_cdf(x, dof) : noncentral_chi2_cdf(x, dof, noncentrality);
}

GlrSummands glr_summands(const MeasurementBlock& block, std::span<const double> estimates,
                         int time_bandwidth) {
  const std::size_t n = block.n_nodes();
  if (estimates.size() != n) throw DomainError("glr_summands: estimate length != block width");
  const double sqrt_m = std::sqrt(static_cast<double>(time_bandwidth));
  GlrSummands s;
  s.c1_terms.resize(n);
  s.c2_terms.resize(n);
  s.u_terms.resize(n);
  s.w_terms.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double c = estimates[k];
    const double d = 1.0 + 2.0 * c;
    if (!(d > 0.0)) throw DomainError("glr_summands: estimate must satisfy 1 + 2c > 0");
    const double mu = sqrt_m * c;
    const auto col = block.column(k);
    KahanSum u, mean;
    for (double z : col) {
      const double x = z - mu;
      u.add(z * z - x * x / d);
      mean.add(z);
    }
    const double m = mean.value() / static_cast<double>(col.size());
    s.c1_terms[k] = c * c / d;
    s.c2_terms[k] = std::log(d);
    s.u_terms[k] = u.value();
    s.w_terms[k] = (m - mu) * c / d;
  }
  return s;
}

GlrAggregates aggregate(const GlrSummands& s) {
  GlrAggregates a;
  for (std::size_t k = 0; k < s.c1_terms.size(); ++k) {
    a.c1 += s.c1_terms[k];
    a.c2 += s.c2_terms[k];
    a.u += s.u_terms[k];
    a.w += s.w_terms[k];
  }
  return a;
}

double log_glr_local(const MeasurementBlock& block, std::span<const double> estimates,
                     int time_bandwidth) {
  return log_likelihood_ratio(block, estimates, time_bandwidth);
}

double fd_statistic(double c1_bar, double c2_bar, double u_bar, double w_bar, int n_slots) {
  if (c1_bar < -1.0) throw DomainError("fd_statistic: c1_bar < -1");
  const double l = static_cast<double>(n_slots);
  return -0.5 * l * (std::log1p(c1_bar) + c2_bar) + 0.5 * u_bar +
         l * w_bar * w_bar / (2.0 * (1.0 + c1_bar));
}

double fd_statistic(const GlrAggregates& agg, int n_slots) {
  return fd_statistic(agg.c1, agg.c2, agg.u, agg.w, n_slots);
}

double lr_oracle(const MeasurementBlock& block, std::span<const double> true_c,
                 int time_bandwidth) {
  for (double v : true_c) {
    if (!(v >= 0.0)) throw DomainError("lr_oracle: true c must be >= 0");
  }
  return log_likelihood_ratio(block, true_c, time_bandwidth);
}

double chi2_cdf(double x, int dof) {
  if (dof < 1) throw DomainError("chi2_cdf: dof must be >= 1");
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double prob, int dof) {
  if (!(prob > 0.0 && prob < 1.0)) throw DomainError("chi2_quantile: prob must be in (0, 1)");
  if (dof < 1) throw DomainError("chi2_quantile: dof must be >= 1");
  // In the upper half the tail is bisected directly, which keeps thresholds
  // for small false-alarm rates accurate.
  const bool upper = prob > 0.5;
  const double tail = 1.0 - prob;
  const double a = 0.5 * dof;
  auto below = [&](double x) {
    return upper ? boost::math::gamma_q(a, 0.5 * x) > tail
                 : boost::math::gamma_p(a, 0.5 * x) < prob;
  };
  double lo = 0.0, hi = static_cast<double>(dof);
  while (below(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-14 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double noncentral_chi2_cdf(double x, int dof, double lambda) {
  if (dof < 1) throw DomainError("noncentral_chi2_cdf: dof must be >= 1");
  if (!(lambda >= 0.0)) throw DomainError("noncentral_chi2_cdf: lambda must be >= 0");
  if (!(x > 0.0)) return 0.0;
  if (lambda == 0.0) return chi2_cdf(x, dof);

  // Walk outward from the Poisson mode so no weight underflows at start.
  const double mu = 0.5 * lambda;
  const double half_x = 0.5 * x;
  const auto mode = static_cast<long>(std::floor(mu));
  auto log_weight = [mu](long j) {
    return -mu + static_cast<double>(j) * std::log(mu) - std::lgamma(static_cast<double>(j) + 1.0);
  };
  constexpr double kTail = 1e-12;

  double mass = 0.0;
  KahanSum total;
  const double w_mode = std::exp(log_weight(mode));
  mass += w_mode;
  total.add(w_mode * boost::math::gamma_p(0.5 * dof + mode, half_x));

  double w_up = w_mode, w_down = w_mode;
  long up = mode, down = mode;
  while (1.0 - mass >= kTail) {
    const bool can_down = down > 0 && w_down > 0.0;
    // Step toward whichever side carries more weight.
    double next_up = w_up * mu / static_cast<double>(up + 1);
    double next_down = can_down ? w_down * static_cast<double>(down) / mu : 0.0;
    if (next_up == 0.0 && next_down == 0.0) break;
    if (next_up >= next_down) {
      ++up;
      w_up = next_up;
      mass += w_up;
      total.add(w_up * boost::math::gamma_p(0.5 * dof + up, half_x));
    } else {
      --down;
      w_down = next_down;
      mass += w_down;
      total.add(w_down * boost::math::gamma_p(0.5 * dof + down, half_x));
    }
  }
  return std::min(1.0, std::max(0.0, total.value()));
}

std::vector<RocPoint> asymptotic_roc(int dof, double lambda, std::span<const double> pfa_grid) {
  std::vector<RocPoint> roc;
  roc.reserve(pfa_grid.size());
  for (double pfa : pfa_grid) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("asymptotic_roc: pfa must be in (0, 1)");
    const double gamma = chi2_quantile(1.0 - pfa, dof);
    roc.push_back({pfa, 1.0 - noncentral_chi2_cdf(gamma, dof, lambda)});
  }
  return roc;
}

}  // namespace dsd
