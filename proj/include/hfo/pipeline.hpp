#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hfo/adm.hpp"
#include "hfo/analytics.hpp"
#include "hfo/filters.hpp"
#include "hfo/signal_io.hpp"
#include "hfo/snn.hpp"

namespace hfo {

struct AdmSettings {
  double threshold_scale = 1.0;
  double refractory_s = 300e-6;
  double amplifier_gain = 8.0;
};

struct DetectionSettings {
  double merge_window_ms = 15.0;
  double min_event_span_ms = 0.0;
  double outlier_max_rate_hz = 2.0;
  double calibration_s = 1.0; // leading segment used to spot outlier neurons
};

struct BandSettings {
  BandSpec ripple = BandSpec::ripple();
  BandSpec fast_ripple = BandSpec::fast_ripple();
};

struct InputRef {
  std::string path;
  FileFormat format = FileFormat::Csv;
  std::string patient_id;
  std::string interval_id;
};

struct RunConfig {
  std::vector<InputRef> inputs;
  std::optional<SynthSpec> synth; // alternative to file inputs
  std::string synth_patient_id = "SYN01";
  std::string synth_interval_id = "I1";
  BandSettings bands;
  AdmSettings adm;
  NetworkConfig network;
  DetectionSettings detection;
  std::string out_dir = "out";
  std::uint64_t seed = 42; // propagated to synth/network unless overridden
  int threads = 0;         // 0 = hardware concurrency; HFO_PIPE_THREADS caps
  bool dump_spikes = false;
  bool dump_raster = false;

  void validate() const;
};

struct ChannelDetection {
  std::string channel;
  double baseline_ripple_uv = 0.0;
  double baseline_fast_ripple_uv = 0.0;
  int disabled_neurons = 0;
  std::vector<HfoEvent> events;
  std::string spikes_csv; // filled when dump_spikes is set
  std::string raster_csv; // filled when dump_raster is set
};

struct IntervalResult {
  std::string patient_id;
  std::string interval_id;
  double duration_s = 0.0;
  std::vector<ChannelDetection> channels;
  HfoVector rates;
};

struct PatientReport {
  std::string patient_id;
  std::vector<std::string> channels;
  std::vector<HfoVector> interval_rates;
  HfoVector mean_rates;
  std::optional<TestRetestScore> test_retest; // absent for single intervals
  std::vector<std::string> hfo_area;
};

struct DetectResult {
  std::vector<IntervalResult> intervals; // ordered (patient_id, interval_id)
  std::vector<PatientReport> patients;   // ordered by patient_id
};

/// filter -> baseline -> ADM -> SNN -> outlier disabling -> event merging
/// for one wideband channel. Thresholds are derived from the baseline of the
/// gain-scaled band signal, i.e. at the ADM amplifier output where the
/// comparators sit.
ChannelDetection detect_channel(const Eigen::ArrayXd& wideband,
                                double sample_rate_hz,
                                const std::string& channel_label,
                                const NetworkParams& network,
                                const RunConfig& config);

/// Full detection over all inputs; channels run on a worker pool, outputs
/// are assembled in deterministic (patient, interval, channel) order.
DetectResult run_detect(const RunConfig& config);

// Parameter sweep ---------------------------------------------------------

struct SweepPoint {
  double threshold_scale = 1.0;
  double w_scale = 1.0;
};

struct SweepScore {
  SweepPoint point;
  int grid_index = 0;
  int hits = 0;       // labeled snippets containing a detection
  int labeled = 0;
  int falses = 0;     // no-event snippets containing a detection
  int nulls = 0;
  double hit_rate = 0.0;
  double false_rate = 0.0;
};

/// Scores every grid point on +/-25 ms snippets around the labels plus
/// matched no-event snippets; ranks by hit rate descending, then false rate
/// ascending, then grid order.
std::vector<SweepScore> sweep_parameters(
    const Recording& recording,
    const std::vector<EventAnnotation>& annotations,
    const std::vector<SweepPoint>& grid, const RunConfig& config);

} // namespace hfo
