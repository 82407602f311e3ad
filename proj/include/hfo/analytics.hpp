#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "hfo/snn.hpp"

namespace hfo {

struct HfoEvent {
  std::string channel;
  double start_s = 0.0;
  double end_s = 0.0;
  int neuron_count = 0; // distinct neurons contributing to the cluster
};

struct HfoVector {
  std::vector<std::string> channels; // order fixed per patient
  Eigen::ArrayXd rates_per_min;
  std::string interval_id;
};

struct TestRetestScore {
  double score = 0.0; // mean pairwise cosine, in [0, 1]
  int zero_pairs = 0; // pairs where a vector was all-zero (contributed 0)
};

enum class Outcome { TN, TP, FN, FP };

const char* to_string(Outcome o);

struct OutcomeRecord {
  std::string patient_id;
  std::vector<std::string> hfo_area;
  std::vector<std::string> resection;
  int ilae_class = 1; // 1 = completely seizure free ... 6 = worse
  Outcome classification = Outcome::TN;
};

/// Exact rational percentage; undefined exactly when the denominator is 0.
struct Metric {
  long num = 0;
  long den = 0;

  bool defined() const { return den != 0; }
  double percent() const;       // exact value, requires defined()
  long rounded() const;         // nearest integer percent
  std::string display() const;  // "--" when undefined
};

struct PredictionMetrics {
  Metric specificity; // TN/(TN+FP)
  Metric sensitivity; // TP/(TP+FN)
  Metric npv;         // TN/(TN+FN)
  Metric ppv;         // TP/(TP+FP)
  Metric accuracy;    // (TP+TN)/N
};

/// Pools all neurons' spikes and merges consecutive spikes with gaps
/// strictly below merge_window_s into single events spanning first-to-last
/// spike. Events shorter than min_event_span_s are dropped (default keeps
/// single-spike events).
std::vector<HfoEvent> detect_hfos(const OutputRaster& raster,
                                  const std::string& channel,
                                  double merge_window_s = 0.015,
                                  double min_event_span_s = 0.0);

double hfo_rate_per_min(std::size_t event_count, double interval_duration_s);

/// Mean over all unordered pairs of the cosine between rate vectors.
/// Pairs involving an all-zero vector contribute 0 and are counted in
/// zero_pairs. Throws on mismatched channel lists or fewer than 2 vectors.
TestRetestScore test_retest(const std::vector<HfoVector>& vectors);

/// Linear-interpolation percentile (order-statistic interpolation), q in [0,1].
double percentile_linear(const Eigen::ArrayXd& values, double q);

/// Channels whose mean rate strictly exceeds the 95th percentile of the
/// per-channel mean-rate distribution. All-equal rates give an empty area.
std::vector<std::string> hfo_area(const HfoVector& mean_rates);

/// Seizure-free := ILAE 1; contained := area subset of resection (empty area
/// counts as contained). TN = contained & free, FN = contained & not free,
/// TP = not contained & not free, FP = not contained & free.
Outcome classify_outcome(const std::vector<std::string>& area,
                         const std::vector<std::string>& resection,
                         int ilae_class);

PredictionMetrics compute_metrics(const std::vector<Outcome>& classifications);

/// Markdown table with one column per labelled metric set; undefined cells
/// render "--".
std::string metrics_markdown(const std::vector<std::string>& column_labels,
                             const std::vector<PredictionMetrics>& columns);

/// Bar chart of per-channel mean rates with standard-error bars.
std::string rates_svg(const std::vector<std::string>& channels,
                      const Eigen::ArrayXd& mean_rates,
                      const Eigen::ArrayXd& stderr_rates,
                      const std::string& title);

std::string events_to_csv(const std::vector<HfoEvent>& events);

} // namespace hfo
