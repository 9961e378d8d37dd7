#include "dsd/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "dsd/numeric.hpp"

namespace dsd {

double lower_bound(EstimateDomain domain) {
  return domain == EstimateDomain::kNonNegative ? 0.0 : kUnconstrainedFloor;
}

LocalMoments local_moments(std::span<const double> column) {
  if (column.empty()) throw DomainError("local_moments: empty column");
  KahanSum sum, sum_sq;
  for (double z : column) {
    sum.add(z);
    sum_sq.add(z * z);
  }
  const double n = static_cast<double>(column.size());
  return {sum.value() / n, sum_sq.value() / n};
}

double local_mle_root(const LocalMoments& moments, int time_bandwidth) {
  if (time_bandwidth < 1) throw DomainError("local_mle: M must be >= 1");
  const double sqrt_m = std::sqrt(static_cast<double>(time_bandwidth));
  const double b = time_bandwidth + 2.0 + sqrt_m * moments.mean;
  const double q = moments.second_moment + sqrt_m * moments.mean - 1.0;
  const double disc = b * b + 4.0 * q;
  if (disc < 0.0) throw DomainError("local_mle: negative discriminant");
  return 0.5 * (std::sqrt(disc) - b);
}

double local_mle(const LocalMoments& moments, int time_bandwidth, EstimateDomain domain) {
  return std::max(local_mle_root(moments, time_bandwidth), lower_bound(domain));
}

std::vector<double> local_mle_vector(const MeasurementBlock& block, int time_bandwidth,
                                     EstimateDomain domain) {
  if (block.n_slots() == 0 || block.n_nodes() == 0) {
    throw DomainError("local_mle_vector: empty block");
  }
  std::vector<double> c(block.n_nodes());
  for (std::size_t k = 0; k < block.n_nodes(); ++k) {
    c[k] = local_mle(local_moments(block.column(k)), time_bandwidth, domain);
  }
  return c;
}

namespace {

void check_dims(const MeasurementBlock& block, std::span<const double> c) {
  if (c.size() != block.n_nodes()) throw DomainError("parameter length != block width");
  for (double v : c) {
    if (!(1.0 + 2.0 * v > 0.0)) throw DomainError("parameter must satisfy 1 + 2c > 0");
  }
}

}  // namespace

double log_likelihood_ratio(const MeasurementBlock& block, std::span<const double> c,
                            int time_bandwidth) {
  check_dims(block, c);
  const double sqrt_m = std::sqrt(static_cast<double>(time_bandwidth));
  const std::size_t n_slots = block.n_slots();
  const double l = static_cast<double>(n_slots);

  double c1 = 0.0, c2 = 0.0;
  KahanSum u_total;
  std::vector<double> slot_sum(n_slots, 0.0);
  for (std::size_t k = 0; k < block.n_nodes(); ++k) {
    const double d = 1.0 + 2.0 * c[k];
    const double ratio = c[k] / d;
    c1 += c[k] * ratio;
    c2 += std::log(d);
    const double mu = sqrt_m * c[k];
    KahanSum u;
    const auto col = block.column(k);
    for (std::size_t t = 0; t < n_slots; ++t) {
      const double x = col[t] - mu;
      u.add(col[t] * col[t] - x * x / d);
      slot_sum[t] += x * ratio;
    }
    u_total.add(u.value());
  }
  double cross = 0.0;
  for (double s : slot_sum) cross += s * s;
  return -0.5 * l * (std::log1p(c1) + c2) + 0.5 * u_total.value() + cross / (2.0 * (1.0 + c1));
}

std::vector<double> log_likelihood_gradient(const MeasurementBlock& block,
                                            std::span<const double> c,
                                            int time_bandwidth) {
  check_dims(block, c);
  const double sqrt_m = std::sqrt(static_cast<double>(time_bandwidth));
  const std::size_t n = block.n_nodes();
  const std::size_t n_slots = block.n_slots();
  const double l = static_cast<double>(n_slots);

  double c1 = 0.0;
  std::vector<double> slot_sum(n_slots, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double ratio = c[k] / (1.0 + 2.0 * c[k]);
    c1 += c[k] * ratio;
    const double mu = sqrt_m * c[k];
    const auto col = block.column(k);
    for (std::size_t t = 0; t < n_slots; ++t) slot_sum[t] += (col[t] - mu) * ratio;
  }
  double s_total = 0.0, s2 = 0.0;
  for (double s : slot_sum) {
    s_total += s;
    s2 += s * s;
  }
  const double a = 1.0 + c1;

  // l(c) = -(L/2)(log a + c2) - Q/2 + S2 / (2a), with
  // Q = sum_l sum_k x^2/d, S2 = sum_l s_l^2, s_l = sum_k x_lk c_k/d_k.
  std::vector<double> grad(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = 1.0 + 2.0 * c[j];
    const double mu = sqrt_m * c[j];
    const auto col = block.column(j);
    double x1 = 0.0, x2 = 0.0, sx = 0.0;
    for (std::size_t t = 0; t < n_slots; ++t) {
      const double x = col[t] - mu;
      x1 += x;
      x2 += x * x;
      sx += slot_sum[t] * x;
    }
    const double dc1 = 2.0 * c[j] * (1.0 + c[j]) / (d * d);
    const double dc2 = 2.0 / d;
    const double dq = -2.0 * sqrt_m * x1 / d - 2.0 * x2 / (d * d);
    const double ds2 = 2.0 * (-sqrt_m * c[j] / d * s_total + sx / (d * d));
    grad[j] = -0.5 * l * (dc1 / a + dc2) - 0.5 * dq + ds2 / (2.0 * a) -
              s2 * dc1 / (2.0 * a * a);
  }
  return grad;
}

GlobalMleResult global_mle_numeric(const MeasurementBlock& block, int time_bandwidth,
                                   const GlobalMleOptions& options) {
  const double lb = lower_bound(options.domain);
  const std::size_t n = block.n_nodes();
  auto project = [lb](std::vector<double>& v) {
    for (double& x : v) x = std::max(x, lb);
  };
  auto pg_norm = [&](const std::vector<double>& x, const std::vector<double>& g) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double step = std::max(x[k] + g[k], lb) - x[k];
      acc += step * step;
    }
    return std::sqrt(acc);
  };

  GlobalMleResult result;
  std::vector<double> x = local_mle_vector(block, time_bandwidth, options.domain);
  double f = log_likelihood_ratio(block, x, time_bandwidth);
  std::vector<double> g = log_likelihood_gradient(block, x, time_bandwidth);
  double step = 1.0 / std::max(1.0, static_cast<double>(block.n_slots()) * (time_bandwidth + 2));

  std::vector<double> trial(n), g_trial;
  int it = 0;
  double pg = pg_norm(x, g);
  for (; it < options.max_iterations && pg >= options.gradient_tolerance; ++it) {
    double t = step;
    double f_trial = f;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = x[k] + t * g[k];
      project(trial);
      double ascent = 0.0;
      for (std::size_t k = 0; k < n; ++k) ascent += g[k] * (trial[k] - x[k]);
      f_trial = log_likelihood_ratio(block, trial, time_bandwidth);
      if (std::isfinite(f_trial) && f_trial >= f + 1e-4 * ascent) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no ascent possible at machine precision
    g_trial = log_likelihood_gradient(block, trial, time_bandwidth);

    // Barzilai-Borwein step for the next iteration.
    double ss = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = trial[k] - x[k];
      ss += s * s;
      sy += s * (g[k] - g_trial[k]);
    }
    step = (sy > 0.0) ? std::clamp(ss / sy, 1e-12, 1e12) : std::min(2.0 * t, 1e12);

    x.swap(trial);
    g.swap(g_trial);
    f = f_trial;
    pg = pg_norm(x, g);
  }

  result.estimate = std::move(x);
  result.objective = f;
  result.projected_gradient_norm = pg;
  result.iterations = it;
  result.converged = pg < options.gradient_tolerance;
  return result;
}

std::vector<double> joint_score(std::span<const double> z, std::span<const double> theta,
                                int time_bandwidth) {
  const std::size_t n = z.size();
  if (theta.size() != n) throw DomainError("joint_score: dimension mismatch");
  const double sqrt_m = std::sqrt(static_cast<double>(time_bandwidth));
  // Sigma = D + theta theta^T, D = diag(1 + 2 theta); Woodbury for Sigma^{-1}.
  double c1 = 0.0, proj = 0.0;
  std::vector<double> x(n), d(n);
  for (std::size_t k = 0; k < n; ++k) {
    d[k] = 1.0 + 2.0 * theta[k];
    x[k] = z[k] - sqrt_m * theta[k];
    c1 += theta[k] * theta[k] / d[k];
    proj += theta[k] * x[k] / d[k];
  }
  const double a = 1.0 + c1;
  std::vector<double> y(n);
  double y_theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = x[k] / d[k] - theta[k] / d[k] * proj / a;
    y_theta += y[k] * theta[k];
  }
  std::vector<double> score(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double v_theta = theta[k] / d[k] / a;
    const double v_kk = 1.0 / d[k] - (theta[k] / d[k]) * (theta[k] / d[k]) / a;
    score[k] = sqrt_m * y[k] - v_theta - v_kk + y_theta * y[k] + y[k] * y[k];
  }
  return score;
}

double local_score(double z, double c, int time_bandwidth) {
  const double sigma = 1.0 + c;
  const double x = z - std::sqrt(static_cast<double>(time_bandwidth)) * c;
  return -1.0 / sigma + std::sqrt(static_cast<double>(time_bandwidth)) * x / (sigma * sigma) +
         x * x / (sigma * sigma * sigma);
}

DenseMatrix fisher_at_zero(int n_nodes, int time_bandwidth) {
  if (n_nodes < 1 || time_bandwidth < 1) throw DomainError("fisher_at_zero: N, M >= 1");
  return DenseMatrix::identity(static_cast<std::size_t>(n_nodes), time_bandwidth + 2.0);
}

DenseMatrix local_fisher(std::span<const double> c, int time_bandwidth) {
  const std::size_t n = c.size();
  DenseMatrix info(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double sk = 1.0 + c[k];
    for (std::size_t j = 0; j < n; ++j) {
      const double sj = 1.0 + c[j];
      const double skj = c[k] * c[j] + (k == j ? 1.0 + 2.0 * c[k] : 0.0);
      info(k, j) = skj / (sk * sk * sj * sj) * (time_bandwidth + 2.0 * skj / (sk * sj));
    }
  }
  return info;
}

}  // namespace dsd
