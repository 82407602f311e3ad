#include "hfo/snn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hfo/detail/format.hpp"
#include "hfo/error.hpp"
#include "hfo/rng.hpp"

namespace hfo {
namespace {

constexpr double kScanStep = 10e-6;    // crossing-search granularity
constexpr double kBisectTol = 1e-6;    // spike-time tolerance

// (exp(-dt/tau_s) - exp(-dt/tau_m)) / (1/tau_m - 1/tau_s): response of the
// membrane to a unit synaptic current decaying with tau_s.
double kernel(double tau_s, double tau_m, double dt) {
  if (std::abs(tau_s - tau_m) < 1e-9 * tau_m)
    return dt * std::exp(-dt / tau_m);
  return (std::exp(-dt / tau_s) - std::exp(-dt / tau_m)) /
         (1.0 / tau_m - 1.0 / tau_s);
}

double kernel_peak(double tau_s, double tau_m) {
  if (std::abs(tau_s - tau_m) < 1e-9 * tau_m)
    return tau_m * std::exp(-1.0);
  const double t_star =
      std::log(tau_m / tau_s) * tau_m * tau_s / (tau_m - tau_s);
  return kernel(tau_s, tau_m, t_star);
}

struct InputEvent {
  double t;
  bool excitatory;
};

void check_stream(const std::vector<double>& times, const char* name) {
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t))
      throw Error::data(std::string("snn input ") + name + ": bad spike time");
    if (!(t >= prev))
      throw Error::data(std::string("snn input ") + name + ": unsorted spikes");
    prev = t;
  }
}

std::vector<InputEvent> merge_events(const SnnInput& input, double duration_s) {
  check_stream(input.ripple_up, "ripple_up");
  check_stream(input.ripple_dn, "ripple_dn");
  check_stream(input.fast_ripple_up, "fast_ripple_up");
  check_stream(input.fast_ripple_dn, "fast_ripple_dn");

  std::vector<InputEvent> events;
  events.reserve(input.ripple_up.size() + input.ripple_dn.size() +
                 input.fast_ripple_up.size() + input.fast_ripple_dn.size());
  auto add = [&](const std::vector<double>& times, bool exc) {
    for (double t : times)
      if (t <= duration_s) events.push_back({t, exc});
  };
  // Stable stream order on ties keeps runs bit-reproducible.
  add(input.ripple_up, true);
  add(input.ripple_dn, false);
  add(input.fast_ripple_up, true);
  add(input.fast_ripple_dn, false);
  std::stable_sort(events.begin(), events.end(),
                   [](const InputEvent& a, const InputEvent& b) { return a.t < b.t; });
  return events;
}

// Per-neuron integration state for the event-driven path.
struct NeuronRun {
  double tau_m, tau_e, tau_i, theta, w_e, w_i, refractory;
  double kmax_e; // sup over dt of kernel(tau_e, tau_m, dt)
  double v = 0.0, i_exc = 0.0, i_inh = 0.0;
  double t = 0.0;
  double refr_until = 0.0;
};

void propagate(NeuronRun& n, double dt) {
  if (dt <= 0.0) return;
  n.v = n.v * std::exp(-dt / n.tau_m) + n.i_exc * kernel(n.tau_e, n.tau_m, dt) -
        n.i_inh * kernel(n.tau_i, n.tau_m, dt);
  n.i_exc *= std::exp(-dt / n.tau_e);
  n.i_inh *= std::exp(-dt / n.tau_i);
}

// Membrane value dt ahead of (v, i_exc, i_inh) without mutating state.
double peek_v(const NeuronRun& n, double dt) {
  return n.v * std::exp(-dt / n.tau_m) + n.i_exc * kernel(n.tau_e, n.tau_m, dt) -
         n.i_inh * kernel(n.tau_i, n.tau_m, dt);
}

// Advance to t_end emitting spikes. The upper bound max(v,0) + i_exc*kmax_e
// over-estimates every future membrane value in the jump-free interval, so
// intervals that cannot cross threshold are propagated in one closed-form
// step; only potentially-crossing stretches are scanned.
void advance_with_threshold(NeuronRun& n, double t_end,
                            std::vector<double>& spikes) {
  while (n.t < t_end) {
    if (n.refr_until > n.t) {
      const double t_stop = std::min(n.refr_until, t_end);
      const double dt = t_stop - n.t;
      n.i_exc *= std::exp(-dt / n.tau_e);
      n.i_inh *= std::exp(-dt / n.tau_i);
      n.v = 0.0;
      n.t = t_stop;
      continue;
    }

    if (std::max(n.v, 0.0) + n.i_exc * n.kmax_e < n.theta) {
      propagate(n, t_end - n.t);
      n.t = t_end;
      return;
    }

    // Scan forward in kScanStep slices until a crossing or the bound decays.
    bool crossed = false;
    while (n.t < t_end) {
      const double step = std::min(kScanStep, t_end - n.t);
      if (n.t + step == n.t) { // remainder below FP resolution
        n.t = t_end;
        break;
      }
      const double v_next = peek_v(n, step);
      if (v_next >= n.theta) {
        // First crossing inside (0, step]: bisect on the exact solution.
        double lo = 0.0, hi = step;
        while (hi - lo > kBisectTol) {
          const double mid = 0.5 * (lo + hi);
          (peek_v(n, mid) >= n.theta ? hi : lo) = mid;
        }
        const double t_spike = n.t + hi;
        propagate(n, hi);
        spikes.push_back(t_spike);
        n.v = 0.0;
        n.t = t_spike;
        n.refr_until = t_spike + n.refractory;
        crossed = true;
        break;
      }
      propagate(n, step);
      n.t = (step < kScanStep) ? t_end : n.t + step;
      if (std::max(n.v, 0.0) + n.i_exc * n.kmax_e < n.theta) {
        propagate(n, t_end - n.t);
        n.t = t_end;
        return;
      }
    }
    if (!crossed) return;
  }
}

} // namespace

void NetworkConfig::validate() const {
  if (n_neurons < 1) throw Error::config("snn: n_neurons must be >= 1");
  if (!(tau_m_mean_s > 0.0)) throw Error::config("snn: tau_m_mean_s must be positive");
  if (tau_m_cv < 0.0 || tau_m_cv >= 1.0)
    throw Error::config("snn: tau_m_cv must lie in [0, 1)");
  for (const auto& range : {tau_exc_range_s, tau_inh_range_s})
    if (!(range[0] > 0.0) || !(range[0] <= range[1]))
      throw Error::config("snn: synapse time-constant ranges must be positive and ordered");
  if (!(v_threshold > 0.0)) throw Error::config("snn: v_threshold must be positive");
  if (refractory_s < 0.0) throw Error::config("snn: refractory_s must be non-negative");
}

int NetworkParams::enabled_count() const {
  return static_cast<int>(std::count(enabled.begin(), enabled.end(), true));
}

SnnInput SnnInput::from_trains(const SpikeTrain& r_up, const SpikeTrain& r_dn,
                               const SpikeTrain& fr_up, const SpikeTrain& fr_dn) {
  SnnInput in;
  in.ripple_up = r_up.times_s;
  in.ripple_dn = r_dn.times_s;
  in.fast_ripple_up = fr_up.times_s;
  in.fast_ripple_dn = fr_dn.times_s;
  return in;
}

std::size_t OutputRaster::total_spikes() const {
  std::size_t n = 0;
  for (const auto& s : spikes) n += s.size();
  return n;
}

OutputRaster OutputRaster::prefix(double t_end) const {
  OutputRaster out;
  out.duration_s = t_end;
  out.spikes.reserve(spikes.size());
  for (const auto& train : spikes) {
    auto it = std::lower_bound(train.begin(), train.end(), t_end);
    out.spikes.emplace_back(train.begin(), it);
  }
  return out;
}

double single_spike_peak(double w, double tau_m_s, double tau_exc_s) {
  return w * kernel_peak(tau_exc_s, tau_m_s);
}

double default_excitatory_weight(const NetworkConfig& config) {
  const double tau_m = config.tau_m_mean_s;
  const double tau_e = 0.5 * (config.tau_exc_range_s[0] + config.tau_exc_range_s[1]);
  // Peak response to 20 spikes at 1 kHz with unit weight, scanned on the
  // exact solution at 1 us; the dynamics are linear in the weight.
  double v = 0.0, ie = 0.0;
  double v_max = 0.0;
  const double h = 1e-6;
  const double em = std::exp(-h / tau_m);
  const double ke = kernel(tau_e, tau_m, h);
  const double ee = std::exp(-h / tau_e);
  const double t_total = 19e-3 + 10.0 * tau_m;
  const auto steps = static_cast<long>(t_total / h);
  int delivered = 0;
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    while (delivered < 20 && t >= static_cast<double>(delivered) * 1e-3) {
      ie += 1.0;
      ++delivered;
    }
    v = v * em + ie * ke;
    ie *= ee;
    v_max = std::max(v_max, v);
  }
  return config.v_threshold / v_max;
}

NetworkParams sample_network(const NetworkConfig& config) {
  config.validate();
  const double w_e = config.w_exc > 0.0 ? config.w_exc
                                        : default_excitatory_weight(config);
  const double w_i = config.w_inh > 0.0 ? config.w_inh : w_e;

  NetworkParams p;
  const int n = config.n_neurons;
  p.tau_m_s.resize(n);
  p.tau_exc_s.resize(n);
  p.tau_inh_s.resize(n);
  p.threshold = Eigen::ArrayXd::Constant(n, config.v_threshold);
  p.w_exc = Eigen::ArrayXd::Constant(n, w_e);
  p.w_inh = Eigen::ArrayXd::Constant(n, w_i);
  p.refractory_s = config.refractory_s;
  p.enabled.assign(static_cast<std::size_t>(n), true);

  Rng rng(config.seed);
  const double mean = config.tau_m_mean_s;
  const double sigma = config.tau_m_cv * mean;
  for (int i = 0; i < n; ++i) {
    double tau_m = mean;
    if (sigma > 0.0) {
      // Truncated normal: resample outside +/-3 sigma (clamp as a bounded
      // fallback so the draw count per neuron stays deterministic-friendly).
      int tries = 0;
      do {
        tau_m = rng.normal(mean, sigma);
        ++tries;
      } while (std::abs(tau_m - mean) > 3.0 * sigma && tries < 64);
      tau_m = std::clamp(tau_m, mean - 3.0 * sigma, mean + 3.0 * sigma);
    }
    p.tau_m_s[i] = std::max(tau_m, 1e-3);
    p.tau_exc_s[i] = rng.uniform(config.tau_exc_range_s[0], config.tau_exc_range_s[1]);
    p.tau_inh_s[i] = rng.uniform(config.tau_inh_range_s[0], config.tau_inh_range_s[1]);
  }
  return p;
}

OutputRaster simulate(const NetworkParams& params, const SnnInput& input,
                      double duration_s) {
  if (!(duration_s >= 0.0)) throw Error::data("simulate: bad duration");
  const auto events = merge_events(input, duration_s);

  OutputRaster raster;
  raster.duration_s = duration_s;
  raster.spikes.resize(static_cast<std::size_t>(params.size()));

  for (int i = 0; i < params.size(); ++i) {
    if (!params.enabled[static_cast<std::size_t>(i)]) continue;
    NeuronRun n{params.tau_m_s[i],  params.tau_exc_s[i], params.tau_inh_s[i],
                params.threshold[i], params.w_exc[i],     params.w_inh[i],
                params.refractory_s, 0.0};
    n.kmax_e = kernel_peak(n.tau_e, n.tau_m);
    auto& spikes = raster.spikes[static_cast<std::size_t>(i)];
    for (const auto& ev : events) {
      advance_with_threshold(n, ev.t, spikes);
      (ev.excitatory ? n.i_exc : n.i_inh) += ev.excitatory ? n.w_e : n.w_i;
    }
    advance_with_threshold(n, duration_s, spikes);
  }
  return raster;
}

OutputRaster reference_simulate(const NetworkParams& params,
                                const SnnInput& input, double duration_s,
                                double dt) {
  if (!(duration_s >= 0.0)) throw Error::data("reference_simulate: bad duration");
  if (params.size() > 0 && !(dt <= params.tau_inh_s.minCoeff() / 10.0))
    throw Error::data("reference_simulate: dt too coarse (needs dt <= min(tau_inh)/10)");
  const auto events = merge_events(input, duration_s);

  OutputRaster raster;
  raster.duration_s = duration_s;
  raster.spikes.resize(static_cast<std::size_t>(params.size()));

  const auto n_steps = static_cast<long>(std::ceil(duration_s / dt));
  for (int i = 0; i < params.size(); ++i) {
    if (!params.enabled[static_cast<std::size_t>(i)]) continue;
    const double tau_m = params.tau_m_s[i];
    const double tau_e = params.tau_exc_s[i];
    const double tau_i = params.tau_inh_s[i];
    const double theta = params.threshold[i];
    const double w_e = params.w_exc[i];
    const double w_i = params.w_inh[i];

    double v = 0.0, i_exc = 0.0, i_inh = 0.0;
    double t_cur = 0.0, refr_until = 0.0;
    std::size_t eidx = 0;
    auto& spikes = raster.spikes[static_cast<std::size_t>(i)];

    // Exact decay between points; spikes applied at their own times;
    // threshold checked on the dt grid only.
    auto advance_plain = [&](double to) {
      while (t_cur < to) {
        const double stop = refr_until > t_cur ? std::min(refr_until, to) : to;
        const double d = stop - t_cur;
        const double new_v =
            v * std::exp(-d / tau_m) + i_exc * kernel(tau_e, tau_m, d) -
            i_inh * kernel(tau_i, tau_m, d);
        i_exc *= std::exp(-d / tau_e);
        i_inh *= std::exp(-d / tau_i);
        v = (refr_until > t_cur) ? 0.0 : new_v;
        t_cur = stop;
      }
    };

    for (long k = 0; k < n_steps; ++k) {
      const double t1 = std::min(duration_s, static_cast<double>(k + 1) * dt);
      while (eidx < events.size() && events[eidx].t < t1) {
        advance_plain(events[eidx].t);
        (events[eidx].excitatory ? i_exc : i_inh) +=
            events[eidx].excitatory ? w_e : w_i;
        ++eidx;
      }
      advance_plain(t1);
      if (t_cur >= refr_until && v >= theta) {
        spikes.push_back(t1);
        v = 0.0;
        refr_until = t1 + params.refractory_s;
      }
    }
  }
  return raster;
}

NetworkParams disable_outliers(const NetworkParams& params,
                               const OutputRaster& calibration,
                               double max_rate_hz) {
  if (calibration.spikes.size() != static_cast<std::size_t>(params.size()))
    throw Error::data("disable_outliers: raster size does not match network");
  NetworkParams out = params;
  if (!(calibration.duration_s > 0.0)) return out;
  for (std::size_t i = 0; i < calibration.spikes.size(); ++i) {
    const double rate =
        static_cast<double>(calibration.spikes[i].size()) / calibration.duration_s;
    if (rate > max_rate_hz) out.enabled[i] = false;
  }
  return out;
}

std::string raster_to_csv(const OutputRaster& raster) {
  std::ostringstream out;
  out << "neuron_id,time_s\n";
  for (std::size_t i = 0; i < raster.spikes.size(); ++i)
    for (double t : raster.spikes[i])
      out << i << ',' << detail::fmt_double(t) << "\n";
  return out.str();
}

} // namespace hfo
