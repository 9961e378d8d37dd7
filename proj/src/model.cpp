#include "dsd/model.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dsd/format.hpp"

namespace dsd {

void ModelParams::validate() const {
  if (n_nodes < 1) throw DomainError("n_nodes must be >= 1");
  if (n_slots < 1) throw DomainError("n_slots must be >= 1");
  if (time_bandwidth < 1) throw DomainError("time_bandwidth must be >= 1");
  if (!(noise_power > 0.0)) throw DomainError("noise_power must be > 0");
  if (!(source_power >= 0.0)) throw DomainError("source_power must be >= 0");
  if (!(path_loss_exp > 0.0)) throw DomainError("path_loss_exp must be > 0");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
}

double channel_gain(const Point2& position, const Point2& source, double alpha,
                    double epsilon) {
  if (!(alpha > 0.0) || !(epsilon > 0.0)) {
    throw DomainError("channel_gain: alpha and epsilon must be positive");
  }
  return 1.0 / (epsilon + std::pow(distance(position, source), alpha / 2.0));
}

std::vector<double> snr_vector(const ModelParams& params,
                               std::span<const double> gains) {
  if (!(params.noise_power > 0.0)) throw DomainError("noise_power must be > 0");
  const double ratio = params.source_power / params.noise_power;
  std::vector<double> c(gains.size());
  for (std::size_t k = 0; k < gains.size(); ++k) {
    if (!std::isfinite(gains[k])) throw DomainError("snr_vector: non-finite gain");
    c[k] = ratio * gains[k] * gains[k];
  }
  return c;
}

double noncentrality(std::span<const double> c, int n_slots, int time_bandwidth) {
  double norm2 = 0.0;
  for (double v : c) norm2 += v * v;
  return static_cast<double>(n_slots) * (time_bandwidth + 2) * norm2;
}

double calibrate_snr(double lambda_target, std::span<const double> gains,
                     int n_slots, int time_bandwidth) {
  if (!(lambda_target > 0.0)) throw DomainError("calibrate_snr: lambda must be > 0");
  if (n_slots < 1 || time_bandwidth < 1) {
    throw DomainError("calibrate_snr: L and M must be >= 1");
  }
  double norm2 = 0.0;
  for (double g : gains) norm2 += g * g * g * g;
  if (!(norm2 > 0.0)) {
    throw CalibrationError("calibrate_snr: all gains are zero");
  }
  return std::sqrt(lambda_target / (static_cast<double>(n_slots) * (time_bandwidth + 2))) /
         std::sqrt(norm2);
}

SensorNetwork make_sensor_network(const ModelParams& params,
                                  std::vector<Point2> positions, Point2 source) {
  params.validate();
  if (static_cast<int>(positions.size()) != params.n_nodes) {
    throw DomainError("make_sensor_network: position count != n_nodes");
  }
  SensorNetwork net;
  net.positions = std::move(positions);
  net.source_position = source;
  net.gains.reserve(net.positions.size());
  for (const auto& p : net.positions) {
    net.gains.push_back(channel_gain(p, source, params.path_loss_exp, params.epsilon));
  }
  net.snr_vector = snr_vector(params, net.gains);
  return net;
}

namespace {

void check_snr(const ModelParams& params, std::span<const double> c) {
  params.validate();
  if (static_cast<int>(c.size()) != params.n_nodes) {
    throw DomainError("snr vector length != n_nodes");
  }
  for (double v : c) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("snr entries must be finite and >= 0");
  }
}

}  // namespace

MeasurementBlock sample_gaussian_block(const ModelParams& params,
                                       std::span<const double> c,
                                       Hypothesis hypothesis, Rng& rng) {
  check_snr(params, c);
  const std::size_t n = c.size();
  const std::size_t l_count = static_cast<std::size_t>(params.n_slots);
  MeasurementBlock block(l_count, n, hypothesis);
  std::normal_distribution<double> normal(0.0, 1.0);

  if (hypothesis == Hypothesis::kH0) {
    for (std::size_t l = 0; l < l_count; ++l)
      for (std::size_t k = 0; k < n; ++k) block(l, k) = normal(rng);
    return block;
  }

  const double sqrt_m = std::sqrt(static_cast<double>(params.time_bandwidth));
  std::vector<double> scale(n);
  for (std::size_t k = 0; k < n; ++k) scale[k] = std::sqrt(2.0 * c[k] + 1.0);
  for (std::size_t l = 0; l < l_count; ++l) {
    const double g0 = normal(rng);
    for (std::size_t k = 0; k < n; ++k) {
      block(l, k) = sqrt_m * c[k] + g0 * c[k] + scale[k] * normal(rng);
    }
  }
  return block;
}

MeasurementBlock simulate_raw_energy_block(const ModelParams& params,
                                           std::span<const double> c,
                                           Hypothesis hypothesis, Rng& rng) {
  check_snr(params, c);
  const std::size_t n = c.size();
  const std::size_t l_count = static_cast<std::size_t>(params.n_slots);
  const int m = params.time_bandwidth;
  MeasurementBlock block(l_count, n, hypothesis);

  // Circular convention: real and imaginary parts each carry half the power.
  const double noise_sd = std::sqrt(params.noise_power / 2.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool source_on = hypothesis == Hypothesis::kH1;

  std::vector<double> amp(n);
  for (std::size_t k = 0; k < n; ++k) amp[k] = std::sqrt(c[k] * params.noise_power);

  std::vector<double> s_re(static_cast<std::size_t>(m)), s_im(static_cast<std::size_t>(m));
  for (std::size_t l = 0; l < l_count; ++l) {
    for (int p = 0; p < m; ++p) {
      s_re[p] = source_on ? normal(rng) * std::sqrt(0.5) : 0.0;
      s_im[p] = source_on ? normal(rng) * std::sqrt(0.5) : 0.0;
    }
    for (std::size_t k = 0; k < n; ++k) {
      double energy = 0.0;
      for (int p = 0; p < m; ++p) {
        const double re = amp[k] * s_re[p] + noise_sd * normal(rng);
        const double im = amp[k] * s_im[p] + noise_sd * normal(rng);
        energy += re * re + im * im;
      }
      block(l, k) = energy / m;
    }
  }
  return block;
}

MeasurementBlock simulate_energy_block(const ModelParams& params,
                                       std::span<const double> c,
                                       Hypothesis hypothesis, Rng& rng) {
  MeasurementBlock block = simulate_raw_energy_block(params, c, hypothesis, rng);
  const double scale =
      std::sqrt(static_cast<double>(params.time_bandwidth)) / params.noise_power;
  for (std::size_t k = 0; k < block.n_nodes(); ++k) {
    for (double& v : block.column(k)) v = (v - params.noise_power) * scale;
  }
  return block;
}

void write_layout(std::ostream& out, const NetworkLayout& layout) {
  out << layout.positions.size() << '\n';
  for (std::size_t k = 0; k < layout.positions.size(); ++k) {
    out << k << ' ' << format_exact(layout.positions[k].x) << ' '
        << format_exact(layout.positions[k].y) << '\n';
  }
  out << "source " << format_exact(layout.source.x) << ' '
      << format_exact(layout.source.y) << '\n';
}

NetworkLayout read_layout(std::istream& in) {
  NetworkLayout layout;
  long long n = 0;
  if (!(in >> n) || n < 1) throw DomainError("layout: bad node count");
  layout.positions.resize(static_cast<std::size_t>(n));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (long long i = 0; i < n; ++i) {
    long long idx = 0;
    double x = 0.0, y = 0.0;
    if (!(in >> idx >> x >> y)) throw DomainError("layout: truncated node line");
    if (idx < 0 || idx >= n || seen[static_cast<std::size_t>(idx)]) {
      throw DomainError("layout: bad or repeated node index");
    }
    seen[static_cast<std::size_t>(idx)] = true;
    layout.positions[static_cast<std::size_t>(idx)] = {x, y};
  }
  std::string tag;
  if (!(in >> tag >> layout.source.x >> layout.source.y) || tag != "source") {
    throw DomainError("layout: missing source line");
  }
  return layout;
}

}  // namespace dsd
