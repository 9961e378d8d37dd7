#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dsd/rng.hpp"
#include "dsd/types.hpp"

namespace dsd {

/// Scalar problem constants.
struct ModelParams {
  int n_nodes = 10;         // N
  int n_slots = 50;         // L
  int time_bandwidth = 10;  // M = 2WT
  double noise_power = 1.0;   // sigma_v^2
  double source_power = 0.0;  // sigma_s^2
  double path_loss_exp = 4.0; // alpha
  double epsilon = 1e-3;      // gain regularizer, distance^{alpha/2} units

  /// Throws DomainError if any invariant is violated.
  void validate() const;
};

/// Node layout plus the source, with the derived gains and SNR vector.
struct SensorNetwork {
  std::vector<Point2> positions;
  Point2 source_position;
  std::vector<double> gains;       // |h_k|
  std::vector<double> snr_vector;  // c
};

/// 1 / (epsilon + |position - source|^{alpha/2}).
double channel_gain(const Point2& position, const Point2& source, double alpha,
                    double epsilon);

/// c_k = (source_power / noise_power) * gains[k]^2.
std::vector<double> snr_vector(const ModelParams& params,
                               std::span<const double> gains);

/// lambda = L (M + 2) |c|^2, the noncentrality governing detection power.
double noncentrality(std::span<const double> c, int n_slots, int time_bandwidth);

/// Source-to-noise power ratio r such that c = r * gains^2 reaches
/// `lambda_target`. Throws CalibrationError when every gain is zero.
double calibrate_snr(double lambda_target, std::span<const double> gains,
                     int n_slots, int time_bandwidth);

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds the network for `params`, filling gains and the SNR vector.
SensorNetwork make_sensor_network(const ModelParams& params,
                                  std::vector<Point2> positions,
                                  Point2 source);

/// Draws L i.i.d. rows of the normalized Gaussian model.
///
/// H0 rows are standard normal. H1 rows have mean sqrt(M) c and covariance
/// c c^T + 2 diag(c) + I, realized as sqrt(M) c + g0 c + sqrt(2c + 1) .* g
/// with a shared scalar g0 and independent g, which is exact and O(N).
MeasurementBlock sample_gaussian_block(const ModelParams& params,
                                       std::span<const double> c,
                                       Hypothesis hypothesis, Rng& rng);

/// Coefficient-level energy detector: per slot, M circular complex noise
/// coefficients per node plus (under H1) M source coefficients shared by all
/// nodes, integrated and normalized by (z - sigma_v^2) / (sigma_v^2 / sqrt(M)).
///
/// Only the products |h_k|^2 sigma_s^2 = c_k sigma_v^2 matter, so the shared
/// coefficients are drawn with unit second moment and scaled per node by
/// sqrt(c_k) sigma_v. The phase of h_k is irrelevant for circular sources.
MeasurementBlock simulate_energy_block(const ModelParams& params,
                                       std::span<const double> c,
                                       Hypothesis hypothesis, Rng& rng);

/// Raw (un-normalized) energy values z~_k(l), same sampling as
/// simulate_energy_block. Exposed for moment checks against sigma_v^2 (1 + c).
MeasurementBlock simulate_raw_energy_block(const ModelParams& params,
                                           std::span<const double> c,
                                           Hypothesis hypothesis, Rng& rng);

/// Network layout text format:
///   N
///   index x y      (N lines)
///   source x0 y0
struct NetworkLayout {
  std::vector<Point2> positions;
  Point2 source;
};

void write_layout(std::ostream& out, const NetworkLayout& layout);
NetworkLayout read_layout(std::istream& in);

}  // namespace dsd
