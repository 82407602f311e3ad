#include "hfo/filters.hpp"

#include <cmath>
#include <numbers>

#include "hfo/detail/format.hpp"
#include "hfo/error.hpp"

namespace hfo {

const char* BandSpec::label() const {
  switch (name) {
    case BandName::Ripple: return "ripple";
    case BandName::FastRipple: return "fast_ripple";
    case BandName::Lowpass: return "lowpass";
  }
  return "?";
}

void BandSpec::validate(double sample_rate_hz) const {
  if (!(low_hz > 0.0) || !(low_hz < high_hz))
    throw Error::config(std::string("band ") + label() +
                        ": requires 0 < low_hz < high_hz");
  if (!(high_hz < sample_rate_hz / 2.0))
    throw Error::config(std::string("band ") + label() + ": edge " +
                        detail::fmt_double(high_hz) +
                        " Hz is at or above Nyquist for fs=" +
                        detail::fmt_double(sample_rate_hz));
}

bool BiquadCoeffs::is_stable() const {
  // Triangle condition for a real second-order denominator.
  return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
}

BiquadCoeffs design_bandpass(const BandSpec& band, double sample_rate_hz) {
  band.validate(sample_rate_hz);
  const double k = 2.0 * sample_rate_hz;
  // Pre-warp the edges so the analog -3 dB points map onto the digital ones.
  const double wl = k * std::tan(std::numbers::pi * band.low_hz / sample_rate_hz);
  const double wh = k * std::tan(std::numbers::pi * band.high_hz / sample_rate_hz);
  const double w0_sq = wl * wh;
  const double bw = wh - wl;

  // H(s) = bw*s / (s^2 + bw*s + w0^2) under s = k (1 - z^-1)/(1 + z^-1).
  const double a0 = k * k + bw * k + w0_sq;
  BiquadCoeffs c;
  c.b0 = bw * k / a0;
  c.b1 = 0.0;
  c.b2 = -bw * k / a0;
  c.a1 = 2.0 * (w0_sq - k * k) / a0;
  c.a2 = (k * k - bw * k + w0_sq) / a0;
  c.label = band.label();
  if (!c.is_stable())
    throw Error::internal(std::string("unstable design for band ") + band.label());
  return c;
}

Eigen::ArrayXd filter_channel(const Eigen::ArrayXd& x, const BiquadCoeffs& c) {
  if (!c.is_stable()) throw Error::data("filter_channel: unstable coefficients");
  Eigen::ArrayXd y(x.size());
  double s1 = 0.0, s2 = 0.0; // direct-form II transposed state
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = c.b0 * x[i] + s1;
    s1 = c.b1 * x[i] - c.a1 * v + s2;
    s2 = c.b2 * x[i] - c.a2 * v;
    y[i] = v;
  }
  return y;
}

Recording apply_filter(const Recording& recording, const BiquadCoeffs& c) {
  Recording out = recording;
  for (auto& ch : out.samples) ch = filter_channel(ch, c);
  out.band = out.band.empty() ? c.label : out.band + "+" + c.label;
  return out;
}

} // namespace hfo
