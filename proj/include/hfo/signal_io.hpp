#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfo/recording.hpp"

namespace hfo {

enum class SynthBand { Ripple, FastRipple, Both };

const char* to_string(SynthBand band);
SynthBand synth_band_from_string(const std::string& s);

struct SynthEvent {
  double time_s = 0.0;
  SynthBand band = SynthBand::Ripple;
  double burst_frequency_hz = 0.0;
  double amplitude_uv = 0.0;
  double length_s = 0.0;
};

/// Desk-scale stand-in for the clinical dataset: pink-noise background with
/// Hann-windowed sinusoidal bursts planted at known positions.
struct SynthSpec {
  double duration_s = 60.0;
  double noise_floor_uv = 5.0;
  double sample_rate_hz = 2000.0;
  std::vector<SynthEvent> events;
  std::uint64_t seed = 0;
  std::string channel = "CH1";

  void validate() const; // throws Error::config naming the offending event
};

struct SynthResult {
  Recording recording;
  std::vector<EventAnnotation> annotations;
};

/// Pure function of the spec (seed included): background is 1/f-shaped noise
/// scaled so the 50 ms-window baseline of the first second equals
/// noise_floor_uv; each event adds a Hann-enveloped sinusoid and an
/// annotation spanning exactly the burst extent.
SynthResult synthesize_ieeg(const SynthSpec& spec);

enum class FileFormat { Csv, Binary };

/// CSV layout: line 1 `# sample_rate_hz=<f>`, line 2 channel labels, then
/// one comma-separated row per sample in microvolts. Binary is a compact
/// little-endian dump with the same content.
Recording load_recording(const std::string& path,
                         FileFormat format = FileFormat::Csv);
void save_recording(const Recording& recording, const std::string& path,
                    FileFormat format = FileFormat::Csv);

/// Annotation sidecar: CSV with header channel,start_s,end_s,kind.
std::vector<EventAnnotation> load_annotations(const std::string& path);
void save_annotations(const std::vector<EventAnnotation>& annotations,
                      const std::string& path);

/// Stacks single-channel recordings into one multichannel Recording
/// (equal rates and lengths required). Used to build multi-floor fixtures.
Recording merge_channels(const std::vector<Recording>& parts);

} // namespace hfo
