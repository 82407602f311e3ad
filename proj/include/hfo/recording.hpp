#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace hfo {

/// Multichannel sampled iEEG. Amplitudes are in microvolts throughout.
/// Immutable by convention once constructed; safe to share across threads.
struct Recording {
  double sample_rate_hz = 0.0;
  std::vector<std::string> channels;
  std::vector<Eigen::ArrayXd> samples; // one array per channel, equal lengths
  std::string patient_id;
  std::string interval_id;
  std::string band; // filter stages append the band name; empty = wideband

  Eigen::Index sample_count() const {
    return samples.empty() ? 0 : samples.front().size();
  }

  double duration_s() const {
    return sample_rate_hz > 0.0
               ? static_cast<double>(sample_count()) / sample_rate_hz
               : 0.0;
  }

  const Eigen::ArrayXd& channel(const std::string& label) const;
  int channel_index(const std::string& label) const; // -1 when absent

  /// Throws Error::data naming the channel/sample that breaks an invariant
  /// (unequal lengths, non-finite sample, rate below 1 kHz).
  void validate() const;
};

enum class AnnotationKind { PlantedHfo, LabeledHfo };

const char* to_string(AnnotationKind kind);
AnnotationKind annotation_kind_from_string(const std::string& s);

struct EventAnnotation {
  std::string channel;
  double start_s = 0.0;
  double end_s = 0.0;
  AnnotationKind kind = AnnotationKind::PlantedHfo;
};

} // namespace hfo
