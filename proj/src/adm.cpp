#include "hfo/adm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hfo/detail/format.hpp"
#include "hfo/error.hpp"

namespace hfo {
namespace {

void check_strictly_increasing(const SpikeTrain& train) {
  for (std::size_t i = 1; i < train.times_s.size(); ++i)
    if (!(train.times_s[i] > train.times_s[i - 1]))
      throw Error::data("spike train times not strictly increasing at t=" +
                        detail::fmt_double(train.times_s[i]));
}

} // namespace

void AdmConfig::validate() const {
  if (!(v_tu_uv > 0.0) || !(v_td_uv > 0.0))
    throw Error::data("adm: thresholds must be positive");
  if (refractory_s < 0.0 || refractory_s >= 0.01)
    throw Error::data("adm: refractory_s must lie in [0, 10 ms)");
  if (!(amplifier_gain > 0.0))
    throw Error::data("adm: amplifier_gain must be positive");
}

const char* to_string(Polarity p) { return p == Polarity::Up ? "UP" : "DN"; }

double compute_baseline(const Eigen::ArrayXd& signal, double sample_rate_hz) {
  const auto n1 = static_cast<Eigen::Index>(std::floor(sample_rate_hz));
  if (signal.size() < n1)
    throw Error::data("compute_baseline: signal shorter than 1 s");

  // 20 non-overlapping 50 ms windows over the first second.
  std::array<double, 20> maxima{};
  for (int w = 0; w < 20; ++w) {
    const Eigen::Index lo = (static_cast<Eigen::Index>(w) * n1) / 20;
    const Eigen::Index hi = (static_cast<Eigen::Index>(w + 1) * n1) / 20;
    maxima[static_cast<std::size_t>(w)] =
        signal.segment(lo, hi - lo).abs().maxCoeff();
  }
  std::sort(maxima.begin(), maxima.end());
  // Lowest quartile: mean of the 5 smallest window maxima.
  return (maxima[0] + maxima[1] + maxima[2] + maxima[3] + maxima[4]) / 5.0;
}

AdmConfig thresholds_from_baseline(double baseline_uv, double scale) {
  if (!(baseline_uv > 0.0))
    throw Error::data("thresholds_from_baseline: non-positive baseline");
  if (!(scale > 0.0))
    throw Error::data("thresholds_from_baseline: non-positive scale");
  AdmConfig config;
  config.v_tu_uv = scale * baseline_uv;
  config.v_td_uv = scale * baseline_uv;
  return config;
}

EncodedPair encode(const Eigen::ArrayXd& signal, double sample_rate_hz,
                   const AdmConfig& config, SpikeSource source) {
  config.validate();
  if (!(sample_rate_hz > 0.0)) throw Error::data("encode: bad sample rate");

  EncodedPair out;
  out.up.polarity = Polarity::Up;
  out.dn.polarity = Polarity::Dn;
  out.up.source = source;
  out.dn.source = source;
  if (signal.size() < 2) return out;

  const double gain = config.amplifier_gain;
  const double dt = 1.0 / sample_rate_hz;
  double reference = gain * signal[0];
  double t_free = 0.0;       // emissions allowed from this time on
  double last_emit = -1.0;

  auto emit = [&](Polarity polarity, double t, double new_reference) {
    if (t <= last_emit) t = std::nextafter(last_emit, 1e300);
    (polarity == Polarity::Up ? out.up : out.dn).times_s.push_back(t);
    reference = new_reference;
    t_free = t + config.refractory_s;
    last_emit = t;
  };

  for (Eigen::Index i = 1; i < signal.size(); ++i) {
    const double t0 = static_cast<double>(i - 1) * dt;
    const double t1 = static_cast<double>(i) * dt;
    const double g0 = gain * signal[i - 1];
    const double g1 = gain * signal[i];
    if (t_free >= t1) continue; // fully suppressed segment; reference holds

    double ts = std::max(t0, t_free);
    while (ts < t1) {
      const double gs = g0 + (g1 - g0) * ((ts - t0) / (t1 - t0));
      // A crossing that completed while suppressed fires at release time and
      // resets to the current value (the amplifier re-references on release).
      if (gs - reference >= config.v_tu_uv) {
        emit(Polarity::Up, ts, gs);
      } else if (reference - gs >= config.v_td_uv) {
        emit(Polarity::Dn, ts, gs);
      } else if (g1 - reference >= config.v_tu_uv) {
        // Exact crossing on the linear interpolant (a touch counts, as in
        // continuous time); the reference moves by exactly +v_tu, which is
        // what the reconstruction bound rests on.
        const double target = reference + config.v_tu_uv;
        double t_cross = t0 + (target - g0) / (g1 - g0) * (t1 - t0);
        t_cross = std::clamp(t_cross, ts, t1);
        emit(Polarity::Up, t_cross, target);
      } else if (reference - g1 >= config.v_td_uv) {
        const double target = reference - config.v_td_uv;
        double t_cross = t0 + (target - g0) / (g1 - g0) * (t1 - t0);
        t_cross = std::clamp(t_cross, ts, t1);
        emit(Polarity::Dn, t_cross, target);
      } else {
        break; // no further crossing inside this segment
      }
      if (t_free >= t1) break;
      // With zero refractory this resumes at the emission point; the next
      // crossing then needs a further v_tu/v_td of movement, so the loop
      // always progresses.
      ts = std::max(t_free, last_emit);
    }
  }
  return out;
}

double StepSignal::value_at(double t) const {
  const auto it = std::upper_bound(times_s.begin(), times_s.end(), t);
  const auto idx = static_cast<std::size_t>(it - times_s.begin());
  return idx == 0 ? 0.0 : values[idx - 1];
}

Eigen::ArrayXd StepSignal::sample(double sample_rate_hz) const {
  const auto n = static_cast<Eigen::Index>(std::llround(duration_s * sample_rate_hz));
  Eigen::ArrayXd out(n);
  std::size_t idx = 0;
  double current = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate_hz;
    while (idx < times_s.size() && times_s[idx] <= t) current = values[idx++];
    out[i] = current;
  }
  return out;
}

StepSignal decode(const SpikeTrain& up, const SpikeTrain& dn,
                  const AdmConfig& config, double duration_s) {
  config.validate();
  check_strictly_increasing(up);
  check_strictly_increasing(dn);

  StepSignal out;
  out.duration_s = duration_s;
  out.times_s.reserve(up.times_s.size() + dn.times_s.size());
  out.values.reserve(out.times_s.capacity());

  std::size_t i = 0, j = 0;
  double accumulated = 0.0; // staircase in amplifier-output units
  double last_t = -1.0;
  bool have_last = false;
  while (i < up.times_s.size() || j < dn.times_s.size()) {
    const bool take_up =
        j >= dn.times_s.size() ||
        (i < up.times_s.size() && up.times_s[i] < dn.times_s[j]);
    if (i < up.times_s.size() && j < dn.times_s.size() &&
        up.times_s[i] == dn.times_s[j])
      throw Error::data("decode: interleaved timestamps collide at t=" +
                        detail::fmt_double(up.times_s[i]));
    const double t = take_up ? up.times_s[i++] : dn.times_s[j++];
    if (have_last && !(t > last_t))
      throw Error::data("decode: interleaved timestamps not strictly increasing");
    accumulated += take_up ? config.v_tu_uv : -config.v_td_uv;
    out.times_s.push_back(t);
    out.values.push_back(accumulated / config.amplifier_gain);
    last_t = t;
    have_last = true;
  }
  return out;
}

std::string spikes_to_csv(const std::vector<SpikeTrain>& trains) {
  struct Row {
    double t;
    Polarity polarity;
    const SpikeSource* source;
  };
  std::vector<Row> rows;
  for (const auto& train : trains)
    for (double t : train.times_s) rows.push_back({t, train.polarity, &train.source});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.polarity != b.polarity) return a.polarity == Polarity::Up;
    if (a.source->channel != b.source->channel)
      return a.source->channel < b.source->channel;
    return a.source->band < b.source->band;
  });
  std::ostringstream out;
  out << "time_s,polarity,channel,band\n";
  for (const auto& row : rows)
    out << detail::fmt_double(row.t) << ',' << to_string(row.polarity) << ','
        << row.source->channel << ',' << row.source->band << "\n";
  return out.str();
}

} // namespace hfo
