#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hfo/adm.hpp"

namespace hfo {

/// Two-layer SNN: four input streams fanned out to n_neurons leaky
/// integrate-and-fire neurons. UP streams drive one shared excitatory
/// synapse state per neuron, DN streams the inhibitory one.
struct NetworkConfig {
  int n_neurons = 256;
  double tau_m_mean_s = 0.015;
  double tau_m_cv = 0.20;
  std::array<double, 2> tau_exc_range_s{0.003, 0.006};
  std::array<double, 2> tau_inh_range_s{0.0001, 0.001};
  // Weights <= 0 mean "use the calibrated default": w_exc is anchored so a
  // 20-spike 1 kHz UP burst with the mid-range time constants just reaches
  // v_threshold; w_inh defaults to w_exc.
  double w_exc = 0.0;
  double w_inh = 0.0;
  double v_threshold = 1.0;
  double refractory_s = 0.001;
  std::uint64_t seed = 0x5eed;

  void validate() const;
};

struct NetworkParams {
  Eigen::ArrayXd tau_m_s;
  Eigen::ArrayXd tau_exc_s;
  Eigen::ArrayXd tau_inh_s;
  Eigen::ArrayXd threshold;
  Eigen::ArrayXd w_exc;
  Eigen::ArrayXd w_inh;
  double refractory_s = 0.001;
  std::vector<bool> enabled;

  int size() const { return static_cast<int>(tau_m_s.size()); }
  int enabled_count() const;
};

struct SnnInput {
  std::vector<double> ripple_up;
  std::vector<double> ripple_dn;
  std::vector<double> fast_ripple_up;
  std::vector<double> fast_ripple_dn;

  static SnnInput from_trains(const SpikeTrain& r_up, const SpikeTrain& r_dn,
                              const SpikeTrain& fr_up, const SpikeTrain& fr_dn);
};

struct OutputRaster {
  std::vector<std::vector<double>> spikes; // per neuron, ascending times
  double duration_s = 0.0;

  std::size_t total_spikes() const;
  /// Spikes restricted to [0, t_end); duration becomes t_end.
  OutputRaster prefix(double t_end) const;
};

/// Peak membrane response to a single excitatory spike of weight w
/// (closed form; used for weight anchoring and as a test oracle).
double single_spike_peak(double w, double tau_m_s, double tau_exc_s);

/// Weight that makes a 20-spike, 1 kHz UP burst with mid-range time
/// constants peak exactly at v_threshold.
double default_excitatory_weight(const NetworkConfig& config);

/// Mismatch sampling: tau_m ~ Normal(mean, cv*mean) truncated at +/-3 sigma
/// and floored at 1 ms; synapse time constants uniform over their ranges.
/// Deterministic for a given (config, seed).
NetworkParams sample_network(const NetworkConfig& config);

/// Event-driven simulation with exact exponential propagation between input
/// events; threshold crossings are located by scan + bisection to 1 us.
OutputRaster simulate(const NetworkParams& params, const SnnInput& input,
                      double duration_s);

/// Dense fixed-step oracle: threshold checks on the dt grid, input spikes
/// applied at their exact times. Requires dt <= min(tau_inh)/10.
OutputRaster reference_simulate(const NetworkParams& params,
                                const SnnInput& input, double duration_s,
                                double dt);

/// Neurons whose calibration firing rate exceeds max_rate_hz are disabled;
/// everything else is untouched.
NetworkParams disable_outliers(const NetworkParams& params,
                               const OutputRaster& calibration,
                               double max_rate_hz);

/// CSV with columns neuron_id,time_s.
std::string raster_to_csv(const OutputRaster& raster);

} // namespace hfo
