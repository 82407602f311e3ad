#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace hfo {

/// Asynchronous delta modulator settings. Thresholds live at the ADM
/// amplifier output (the encoder multiplies its input by amplifier_gain
/// before comparing), so the input-referred step is v_tu_uv/amplifier_gain.
struct AdmConfig {
  double v_tu_uv = 0.0;          // UP threshold
  double v_td_uv = 0.0;          // DN threshold magnitude
  double refractory_s = 300e-6;  // shared across polarities (single reset)
  double amplifier_gain = 8.0;

  void validate() const;
};

enum class Polarity { Up, Dn };

const char* to_string(Polarity p);

struct SpikeSource {
  std::string channel;
  std::string band;
};

struct SpikeTrain {
  Polarity polarity = Polarity::Up;
  std::vector<double> times_s; // strictly increasing
  SpikeSource source;
};

struct EncodedPair {
  SpikeTrain up;
  SpikeTrain dn;
};

/// Baseline of one channel: the first second is split into 20 non-overlapping
/// 50 ms windows, the per-window max of |amplitude| is taken, and the mean of
/// the lowest quartile (5 values) is returned. Throws if under 1 s of signal.
double compute_baseline(const Eigen::ArrayXd& signal, double sample_rate_hz);

/// Identity threshold map (v_tu = v_td = scale * baseline) with defaulted
/// refractory period and gain.
AdmConfig thresholds_from_baseline(double baseline_uv, double scale = 1.0);

/// Level-crossing encoder. The reference value starts at the first gained
/// sample; a crossing of +v_tu emits UP, of -v_td emits DN, the reference
/// resets to the value at the crossing and both polarities are suppressed for
/// refractory_s. Crossing times are located exactly on the piecewise-linear
/// interpolant of the gained samples, which is what keeps the decode
/// reconstruction within max(v_tu, v_td)/gain of the input for refractory 0.
EncodedPair encode(const Eigen::ArrayXd& signal, double sample_rate_hz,
                   const AdmConfig& config, SpikeSource source = {});

/// Piecewise-constant reconstruction: steps at the spike times.
struct StepSignal {
  std::vector<double> times_s;  // ascending
  std::vector<double> values;   // value from times_s[i] (inclusive) onward
  double duration_s = 0.0;

  double value_at(double t) const; // 0 before the first step
  Eigen::ArrayXd sample(double sample_rate_hz) const;
};

/// Staircase from 0: +v_tu per UP, -v_td per DN, divided by amplifier_gain.
/// Throws Error::data when the interleaved timestamps are not strictly
/// increasing.
StepSignal decode(const SpikeTrain& up, const SpikeTrain& dn,
                  const AdmConfig& config, double duration_s);

/// CSV with columns time_s,polarity,channel,band; rows merged by time.
std::string spikes_to_csv(const std::vector<SpikeTrain>& trains);

} // namespace hfo
