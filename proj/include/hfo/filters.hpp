#pragma once

#include <Eigen/Core>
#include <string>

#include "hfo/recording.hpp"

namespace hfo {

enum class BandName { Ripple, FastRipple, Lowpass };

struct BandSpec {
  double low_hz = 0.0;
  double high_hz = 0.0;
  BandName name = BandName::Ripple;

  static BandSpec ripple() { return {80.0, 250.0, BandName::Ripple}; }
  static BandSpec fast_ripple() { return {250.0, 500.0, BandName::FastRipple}; }
  // The low-frequency branch: 80 Hz upper edge, lower edge at the LNA
  // high-pass corner (0.9 Hz). Design-only; the detection path uses the
  // two HFO bands.
  static BandSpec lowpass() { return {0.9, 80.0, BandName::Lowpass}; }

  const char* label() const;
  void validate(double sample_rate_hz) const;
};

/// One normalized biquad section (a0 = 1): second-order band-pass.
struct BiquadCoeffs {
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  std::string label;

  /// Poles strictly inside the unit circle.
  bool is_stable() const;
};

/// Second-order Butterworth band-pass (first-order low-pass prototype under
/// the band transform) mapped with the bilinear transform; band edges are
/// pre-warped so the -3 dB points land on the digital edges.
BiquadCoeffs design_bandpass(const BandSpec& band, double sample_rate_hz);

/// Causal direct-form II transposed filtering, zero initial state.
Eigen::ArrayXd filter_channel(const Eigen::ArrayXd& x, const BiquadCoeffs& c);

/// Filters every channel; metadata carried over with the band name appended.
Recording apply_filter(const Recording& recording, const BiquadCoeffs& c);

} // namespace hfo
