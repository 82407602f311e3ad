#pragma once

namespace hfo {

// Closed-form calculators for the analog headstage design equations. These
// document the filter targets; nothing here simulates a transient circuit.

struct TowThomasParams {
  double r1_ohm = 0.0;
  double r2_ohm = 0.0;
  double r3_ohm = 0.0;
  double r4_ohm = 0.0;
  double r5_ohm = 0.0; // loop-gain divider; does not enter the response
  double r6_ohm = 0.0;
  double c1_f = 0.0;

  void validate() const;
};

struct LnaParams {
  double c_in_f = 0.0;   // selectable input capacitor (2/8/14/20 pF steps)
  double c_f_f = 0.0;    // feedback capacitor
  double gm_s = 0.0;     // OTA transconductance
  double c_load_f = 0.0; // capacitive load

  void validate() const; // positive values, c_in >= c_f
};

struct BandpassResponse {
  double f0_hz = 0.0;
  double gain_linear = 0.0;
  double bw_hz = 0.0;
};

/// 20*log10(c_in/c_f).
double lna_gain_db(const LnaParams& p);

/// gm / (gain_linear * c_load), applied exactly as printed. With
/// gm=20 nS, c_load=20 fF, gain=100 this gives 10 kHz (the quoted figure
/// is ~11.1 kHz; the calculator reports the formula value verbatim).
double lna_bandwidth_hz(const LnaParams& p, double gain_linear);

/// f0 = 1/(2*pi*sqrt(r3*r4*c1^2)), gain = r4/r1,
/// bw = 2*pi*f0*sqrt(r3*r4)/r2. For r3 = r4 = R these reduce to
/// f0 = 1/(2*pi*R*c1), gain = R/r1, bw = 1/(r2*c1).
BandpassResponse towthomas_response(const TowThomasParams& p);

} // namespace hfo
