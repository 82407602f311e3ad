#include "hfo/headstage.hpp"

#include <cmath>
#include <numbers>

#include "hfo/error.hpp"

namespace hfo {

void TowThomasParams::validate() const {
  const double values[] = {r1_ohm, r2_ohm, r3_ohm, r4_ohm, r5_ohm, r6_ohm, c1_f};
  for (double v : values)
    if (!(v > 0.0))
      throw Error::config("tow-thomas: all component values must be positive");
}

void LnaParams::validate() const {
  const double values[] = {c_in_f, c_f_f, gm_s, c_load_f};
  for (double v : values)
    if (!(v > 0.0)) throw Error::config("lna: all component values must be positive");
  if (c_in_f < c_f_f) throw Error::config("lna: requires c_in >= c_f");
}

double lna_gain_db(const LnaParams& p) {
  p.validate();
  return 20.0 * std::log10(p.c_in_f / p.c_f_f);
}

double lna_bandwidth_hz(const LnaParams& p, double gain_linear) {
  p.validate();
  if (!(gain_linear > 0.0)) throw Error::config("lna: gain_linear must be positive");
  return p.gm_s / (gain_linear * p.c_load_f);
}

BandpassResponse towthomas_response(const TowThomasParams& p) {
  p.validate();
  const double two_pi = 2.0 * std::numbers::pi;
  const double root = std::sqrt(p.r3_ohm * p.r4_ohm * p.c1_f * p.c1_f);
  BandpassResponse r;
  r.f0_hz = 1.0 / (two_pi * root);
  r.gain_linear = p.r4_ohm / p.r1_ohm;
  r.bw_hz = two_pi * r.f0_hz * std::sqrt(p.r3_ohm * p.r4_ohm) / p.r2_ohm;
  return r;
}

} // namespace hfo
