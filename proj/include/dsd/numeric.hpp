#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dsd {

/// Compensated (Kahan-Babuska / Neumaier) running sum.
class KahanSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// sup_x |F_n(x) - F(x)| for a sample against a continuous CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

/// sup_x |F_a(x) - F_b(x)| between two empirical distributions.
double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

/// Empirical quantile, linear interpolation between order statistics
/// (type 7). `sorted` must be ascending and nonempty.
double empirical_quantile(std::span<const double> sorted, double prob);

/// sqrt(p (1 - p) / n).
double binomial_stderr(double p, std::size_t n);

}  // namespace dsd
