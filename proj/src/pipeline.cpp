#include "hfo/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include "hfo/detail/format.hpp"
#include "hfo/error.hpp"

namespace hfo {
namespace {

int resolve_thread_count(int requested, std::size_t n_tasks) {
  int threads = requested > 0
                    ? requested
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* cap = std::getenv("HFO_PIPE_THREADS")) {
    const int limit = std::atoi(cap);
    if (limit > 0) threads = std::min(threads, limit);
  }
  return std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n_tasks, 1)));
}

// Runs tasks over a small worker pool; results land by index so the output
// is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n_tasks, int threads, Fn&& fn) {
  if (threads <= 1 || n_tasks <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_tasks) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

HfoVector interval_vector(const IntervalResult& interval,
                          const std::vector<std::string>& channels) {
  HfoVector v;
  v.channels = channels;
  v.interval_id = interval.interval_id;
  v.rates_per_min.resize(static_cast<Eigen::Index>(channels.size()));
  for (std::size_t c = 0; c < channels.size(); ++c)
    v.rates_per_min[static_cast<Eigen::Index>(c)] = hfo_rate_per_min(
        interval.channels[c].events.size(), interval.duration_s);
  return v;
}

} // namespace

void RunConfig::validate() const {
  if (inputs.empty() && !synth.has_value())
    throw Error::config("run config: no inputs and no synth spec");
  if (!inputs.empty() && synth.has_value())
    throw Error::config("run config: choose either file inputs or a synth spec");
  if (synth.has_value()) synth->validate();
  network.validate();
  if (!(adm.threshold_scale > 0.0))
    throw Error::config("run config: adm.threshold_scale must be positive");
  if (!(detection.merge_window_ms > 0.0))
    throw Error::config("run config: detection.merge_window_ms must be positive");
  if (detection.min_event_span_ms < 0.0)
    throw Error::config("run config: detection.min_event_span_ms must be non-negative");
  if (!(detection.calibration_s > 0.0))
    throw Error::config("run config: detection.calibration_s must be positive");
  if (!(detection.outlier_max_rate_hz >= 0.0))
    throw Error::config("run config: detection.outlier_max_rate_hz must be non-negative");
}

ChannelDetection detect_channel(const Eigen::ArrayXd& wideband,
                                double sample_rate_hz,
                                const std::string& channel_label,
                                const NetworkParams& network,
                                const RunConfig& config) {
  const double fs = sample_rate_hz;
  const double duration = static_cast<double>(wideband.size()) / fs;

  ChannelDetection result;
  result.channel = channel_label;

  std::array<BandSpec, 2> bands{config.bands.ripple, config.bands.fast_ripple};
  std::array<EncodedPair, 2> encoded;
  std::array<double, 2> baselines{};
  std::vector<SpikeTrain> all_trains;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto coeffs = design_bandpass(bands[b], fs);
    const Eigen::ArrayXd band_signal = filter_channel(wideband, coeffs);
    const double baseline = compute_baseline(band_signal, fs);
    baselines[b] = baseline;
    // The comparators sit behind the ADM input amplifier, so the optimal
    // per-channel threshold (== the baseline) is referred to that plane.
    AdmConfig adm = thresholds_from_baseline(
        baseline * config.adm.amplifier_gain, config.adm.threshold_scale);
    adm.refractory_s = config.adm.refractory_s;
    adm.amplifier_gain = config.adm.amplifier_gain;
    encoded[b] = encode(band_signal, fs, adm,
                        SpikeSource{channel_label, coeffs.label});
    if (config.dump_spikes) {
      all_trains.push_back(encoded[b].up);
      all_trains.push_back(encoded[b].dn);
    }
  }
  result.baseline_ripple_uv = baselines[0];
  result.baseline_fast_ripple_uv = baselines[1];

  const SnnInput input = SnnInput::from_trains(encoded[0].up, encoded[0].dn,
                                               encoded[1].up, encoded[1].dn);
  const OutputRaster raster = simulate(network, input, duration);

  // Outlier neurons are spotted on the leading calibration segment and
  // silenced for the whole interval.
  const double calib_end = std::min(config.detection.calibration_s, duration);
  const NetworkParams active = disable_outliers(
      network, raster.prefix(calib_end), config.detection.outlier_max_rate_hz);
  OutputRaster enabled_raster = raster;
  for (std::size_t n = 0; n < enabled_raster.spikes.size(); ++n)
    if (!active.enabled[n]) enabled_raster.spikes[n].clear();
  result.disabled_neurons = network.enabled_count() - active.enabled_count();

  result.events = detect_hfos(enabled_raster, channel_label,
                              config.detection.merge_window_ms * 1e-3,
                              config.detection.min_event_span_ms * 1e-3);
  if (config.dump_spikes) result.spikes_csv = spikes_to_csv(all_trains);
  if (config.dump_raster) result.raster_csv = raster_to_csv(enabled_raster);
  return result;
}

DetectResult run_detect(const RunConfig& config) {
  config.validate();

  struct LoadedInterval {
    Recording recording;
  };
  std::vector<LoadedInterval> loaded;
  if (config.synth.has_value()) {
    auto synth = synthesize_ieeg(*config.synth);
    synth.recording.patient_id = config.synth_patient_id;
    synth.recording.interval_id = config.synth_interval_id;
    loaded.push_back({std::move(synth.recording)});
  } else {
    for (const auto& ref : config.inputs) {
      Recording rec = load_recording(ref.path, ref.format);
      rec.patient_id = ref.patient_id;
      rec.interval_id = ref.interval_id;
      loaded.push_back({std::move(rec)});
    }
  }
  for (const auto& li : loaded) {
    if (li.recording.duration_s() < std::max(1.0, config.detection.calibration_s))
      throw Error::data("recording '" + li.recording.patient_id + "/" +
                        li.recording.interval_id +
                        "' is too short for baseline and calibration");
  }

  // Deterministic interval order regardless of input declaration order.
  std::stable_sort(loaded.begin(), loaded.end(),
                   [](const LoadedInterval& a, const LoadedInterval& b) {
                     if (a.recording.patient_id != b.recording.patient_id)
                       return a.recording.patient_id < b.recording.patient_id;
                     return a.recording.interval_id < b.recording.interval_id;
                   });

  const NetworkParams network = sample_network(config.network);

  struct Task {
    std::size_t interval;
    std::size_t channel;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < loaded.size(); ++i)
    for (std::size_t c = 0; c < loaded[i].recording.channels.size(); ++c)
      tasks.push_back({i, c});

  std::vector<ChannelDetection> detections(tasks.size());
  parallel_for(tasks.size(), resolve_thread_count(config.threads, tasks.size()),
               [&](std::size_t t) {
                 const auto& rec = loaded[tasks[t].interval].recording;
                 detections[t] = detect_channel(rec.samples[tasks[t].channel],
                                                rec.sample_rate_hz,
                                                rec.channels[tasks[t].channel],
                                                network, config);
               });

  DetectResult result;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const auto& rec = loaded[i].recording;
    IntervalResult interval;
    interval.patient_id = rec.patient_id;
    interval.interval_id = rec.interval_id;
    interval.duration_s = rec.duration_s();
    for (std::size_t c = 0; c < rec.channels.size(); ++c)
      interval.channels.push_back(std::move(detections[cursor++]));
    interval.rates = interval_vector(interval, rec.channels);
    result.intervals.push_back(std::move(interval));
  }

  // Patient-level aggregation in patient order.
  std::map<std::string, std::vector<const IntervalResult*>> by_patient;
  for (const auto& interval : result.intervals)
    by_patient[interval.patient_id].push_back(&interval);
  for (const auto& [patient_id, intervals] : by_patient) {
    PatientReport report;
    report.patient_id = patient_id;
    report.channels = intervals.front()->rates.channels;
    for (const auto* interval : intervals) {
      if (interval->rates.channels != report.channels)
        throw Error::data("patient '" + patient_id +
                          "': channel sets differ across intervals");
      report.interval_rates.push_back(interval->rates);
    }
    report.mean_rates.channels = report.channels;
    report.mean_rates.interval_id = "mean";
    report.mean_rates.rates_per_min =
        Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(report.channels.size()));
    for (const auto& v : report.interval_rates)
      report.mean_rates.rates_per_min += v.rates_per_min;
    report.mean_rates.rates_per_min /=
        static_cast<double>(report.interval_rates.size());
    if (report.interval_rates.size() >= 2)
      report.test_retest = test_retest(report.interval_rates);
    report.hfo_area = hfo_area(report.mean_rates);
    result.patients.push_back(std::move(report));
  }
  return result;
}

std::vector<SweepScore> sweep_parameters(
    const Recording& recording,
    const std::vector<EventAnnotation>& annotations,
    const std::vector<SweepPoint>& grid, const RunConfig& config) {
  if (grid.empty()) throw Error::config("sweep: empty grid");
  if (annotations.empty()) throw Error::data("sweep: no labeled events");
  recording.validate();

  // +/-25 ms snippets around the labels, plus matched no-event snippets of the
  // same spans placed greedily in the gaps (>= 50 ms away from any label).
  struct Snippet {
    double start, end;
  };
  const double duration = recording.duration_s();
  std::map<std::string, std::vector<Snippet>> labeled_by_channel;
  std::map<std::string, std::vector<Snippet>> nulls_by_channel;
  for (const auto& a : annotations)
    labeled_by_channel[a.channel].push_back(
        {std::max(0.0, a.start_s - 0.025), a.end_s + 0.025});
  for (auto& [channel, labeled] : labeled_by_channel) {
    std::sort(labeled.begin(), labeled.end(),
              [](const Snippet& a, const Snippet& b) { return a.start < b.start; });
    auto& nulls = nulls_by_channel[channel];
    const double margin = 0.05;
    double t = std::max(1.0, config.detection.calibration_s); // skip warm-up
    std::size_t li = 0;
    for (std::size_t k = 0; k < labeled.size() && t < duration;) {
      const double span = labeled[k].end - labeled[k].start;
      if (t + span > duration) break;
      while (li < labeled.size() && labeled[li].end + margin < t) ++li;
      const bool clashes =
          li < labeled.size() && t + span > labeled[li].start - margin;
      if (clashes) {
        t = labeled[li].end + margin;
      } else {
        nulls.push_back({t, t + span});
        t += span + margin;
        ++k;
      }
    }
  }
  std::size_t n_labeled_total = 0, n_nulls_total = 0;
  for (const auto& [channel, v] : labeled_by_channel) n_labeled_total += v.size();
  for (const auto& [channel, v] : nulls_by_channel) n_nulls_total += v.size();

  const NetworkConfig base_net = config.network;
  std::vector<SweepScore> scores(grid.size());
  parallel_for(
      grid.size(), resolve_thread_count(config.threads, grid.size()),
      [&](std::size_t g) {
        RunConfig point_config = config;
        point_config.adm.threshold_scale =
            config.adm.threshold_scale * grid[g].threshold_scale;
        NetworkConfig net = base_net;
        if (grid[g].w_scale != 1.0) {
          NetworkConfig resolved = base_net;
          const double w = default_excitatory_weight(resolved);
          net.w_exc = (base_net.w_exc > 0.0 ? base_net.w_exc : w) * grid[g].w_scale;
          net.w_inh = (base_net.w_inh > 0.0 ? base_net.w_inh : w) * grid[g].w_scale;
        }
        const NetworkParams params = sample_network(net);

        SweepScore score;
        score.point = grid[g];
        score.grid_index = static_cast<int>(g);
        score.labeled = static_cast<int>(n_labeled_total);
        score.nulls = static_cast<int>(n_nulls_total);
        for (std::size_t c = 0; c < recording.channels.size(); ++c) {
          const auto& channel = recording.channels[c];
          const auto labeled_it = labeled_by_channel.find(channel);
          if (labeled_it == labeled_by_channel.end()) continue;
          const auto detection =
              detect_channel(recording.samples[c], recording.sample_rate_hz,
                             channel, params, point_config);
          auto overlaps = [&](const Snippet& s) {
            for (const auto& e : detection.events)
              if (e.start_s <= s.end && e.end_s >= s.start) return true;
            return false;
          };
          for (const auto& s : labeled_it->second)
            if (overlaps(s)) ++score.hits;
          for (const auto& s : nulls_by_channel.at(channel))
            if (overlaps(s)) ++score.falses;
        }
        score.hit_rate =
            score.labeled > 0 ? static_cast<double>(score.hits) / score.labeled : 0.0;
        score.false_rate =
            score.nulls > 0 ? static_cast<double>(score.falses) / score.nulls : 0.0;
        scores[g] = score;
      });

  std::stable_sort(scores.begin(), scores.end(),
                   [](const SweepScore& a, const SweepScore& b) {
                     if (a.hit_rate != b.hit_rate) return a.hit_rate > b.hit_rate;
                     if (a.false_rate != b.false_rate) return a.false_rate < b.false_rate;
                     return a.grid_index < b.grid_index; // tie: grid order
                   });
  return scores;
}

} // namespace hfo
