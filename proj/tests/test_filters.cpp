#include <doctest.h>

#include <cmath>

#include "hfo/error.hpp"
#include "hfo/filters.hpp"
#include "hfo/rng.hpp"
#include "hfo/signal_io.hpp"
#include "testing.hpp"

using namespace hfo;
using hfo::testing::biquad_magnitude;
using hfo::testing::sine;

namespace {

double peak_magnitude(const BiquadCoeffs& c, double fs) {
  double peak = 0.0;
  for (double f = 0.5; f < fs / 2.0; f += 0.25)
    peak = std::max(peak, biquad_magnitude(c, f, fs));
  return peak;
}

// -3 dB point bracketed between f_lo and f_hi, located by bisection on the
// dense-response oracle.
double half_power_edge(const BiquadCoeffs& c, double fs, double f_lo,
                       double f_hi, double reference) {
  const double target = reference / std::sqrt(2.0);
  double lo = f_lo, hi = f_hi;
  const bool rising = biquad_magnitude(c, lo, fs) < target;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    const bool below = biquad_magnitude(c, mid, fs) < target;
    (below == rising ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("band-pass designs hit their -3 dB edges (response oracle)") {
  const double fs = 2000.0;
  struct Case {
    BandSpec band;
    double lo, hi;
  };
  for (const auto& tc : {Case{BandSpec::ripple(), 80.0, 250.0},
                         Case{BandSpec::fast_ripple(), 250.0, 500.0}}) {
    const auto c = design_bandpass(tc.band, fs);
    REQUIRE(c.is_stable());
    const double peak = peak_magnitude(c, fs);
    const double center = std::sqrt(tc.lo * tc.hi);

    CHECK(biquad_magnitude(c, center, fs) >= 0.99 * peak);
    CHECK(biquad_magnitude(c, 1e-9, fs) < 1e-9);       // DC zero
    CHECK(biquad_magnitude(c, fs / 2.0, fs) < 1e-9);   // Nyquist zero

    const double lo_edge = half_power_edge(c, fs, 1.0, center, peak);
    const double hi_edge = half_power_edge(c, fs, center, fs / 2.0 - 1.0, peak);
    CHECK(lo_edge == doctest::Approx(tc.lo).epsilon(0.05));
    CHECK(hi_edge == doctest::Approx(tc.hi).epsilon(0.05));
  }
}

TEST_CASE("design rejects bands at or above Nyquist") {
  CHECK_THROWS_AS(design_bandpass(BandSpec::fast_ripple(), 1000.0), Error);
  CHECK_THROWS_AS(design_bandpass(BandSpec{0.0, 100.0, BandName::Ripple}, 2000.0),
                  Error);
}

TEST_CASE("zero input stays zero; tones land in the expected response range") {
  const double fs = 2000.0;
  const auto ripple = design_bandpass(BandSpec::ripple(), fs);
  const auto fast = design_bandpass(BandSpec::fast_ripple(), fs);

  CHECK(filter_channel(Eigen::ArrayXd::Zero(1000), ripple).abs().maxCoeff() == 0.0);

  // Steady-state amplitude over the last half of a 2 s tone.
  auto steady_amp = [&](const BiquadCoeffs& c, double f) {
    const auto y = filter_channel(sine(f, 1.0, fs, 2.0), c);
    return y.tail(y.size() / 2).abs().maxCoeff();
  };
  const double in_band = steady_amp(ripple, 165.0);
  CHECK(in_band >= 0.7);
  CHECK(in_band <= 1.0);
  CHECK(steady_amp(fast, 600.0) <= 0.5);
}

TEST_CASE("linearity within 1e-9 relative error") {
  const double fs = 2000.0;
  const auto c = design_bandpass(BandSpec::ripple(), fs);
  Rng rng(15);
  Eigen::ArrayXd x(2000), y(2000);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = rng.normal(0.0, 3.0);
    y[i] = rng.normal(0.0, 3.0);
  }
  const double a = 2.5, b = -1.25;
  const Eigen::ArrayXd lhs = filter_channel(a * x + b * y, c);
  const Eigen::ArrayXd rhs = a * filter_channel(x, c) + b * filter_channel(y, c);
  const double scale = rhs.abs().maxCoeff();
  CHECK((lhs - rhs).abs().maxCoeff() <= 1e-9 * scale);
}

TEST_CASE("impulse response decays below 1e-12 within 2 s") {
  const double fs = 2000.0;
  for (const auto& band : {BandSpec::ripple(), BandSpec::fast_ripple()}) {
    Eigen::ArrayXd x = Eigen::ArrayXd::Zero(3 * 2000);
    x[0] = 1.0;
    const auto y = filter_channel(x, design_bandpass(band, fs));
    CHECK(y.tail(y.size() - 2 * 2000).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("causality: outputs agree on the common prefix") {
  const double fs = 2000.0;
  const auto c = design_bandpass(BandSpec::ripple(), fs);
  Rng rng(77);
  Eigen::ArrayXd x1(1000);
  for (Eigen::Index i = 0; i < x1.size(); ++i) x1[i] = rng.normal(0.0, 1.0);
  Eigen::ArrayXd x2 = x1;
  x2.tail(500) += 5.0; // diverge after the prefix
  const auto y1 = filter_channel(x1, c);
  const auto y2 = filter_channel(x2, c);
  CHECK((y1.head(500) == y2.head(500)).all());
  CHECK_FALSE((y1.tail(500) == y2.tail(500)).all());
}

TEST_CASE("apply_filter keeps metadata and appends the band name") {
  SynthSpec spec;
  spec.duration_s = 1.0;
  spec.noise_floor_uv = 5.0;
  Recording rec = synthesize_ieeg(spec).recording;
  rec.patient_id = "P1";
  rec.interval_id = "I3";

  const auto filtered = apply_filter(rec, design_bandpass(BandSpec::ripple(), 2000.0));
  CHECK(filtered.patient_id == "P1");
  CHECK(filtered.interval_id == "I3");
  CHECK(filtered.band == "ripple");
  CHECK(filtered.sample_count() == rec.sample_count());
  CHECK_FALSE((filtered.samples[0] == rec.samples[0]).all());
}
