#include "hfo/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hfo/adm.hpp"
#include "hfo/detail/format.hpp"
#include "hfo/error.hpp"
#include "hfo/rng.hpp"

namespace hfo {
namespace {

using detail::fmt_double;
using detail::parse_double;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

constexpr char kHeaderPrefix[] = "# sample_rate_hz=";
constexpr char kBinaryMagic[4] = {'H', 'F', 'O', '1'};

Recording load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error::data("cannot open recording file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw Error::data(path + ": malformed header: file is empty");
  line = strip_cr(line);
  if (line.rfind(kHeaderPrefix, 0) != 0)
    throw Error::data(path + ": malformed header: line 1 must start with '" +
                      std::string(kHeaderPrefix) + "'");
  double rate = 0.0;
  if (!parse_double(line.substr(std::strlen(kHeaderPrefix)), rate))
    throw Error::data(path + ": malformed header: sample_rate_hz is not a number");
  if (!(rate >= 1000.0))
    throw Error::data(path + ": sample_rate_hz=" + fmt_double(rate) +
                      " is below the 1000 Hz minimum");

  if (!std::getline(in, line))
    throw Error::data(path + ": malformed header: missing channel label row");
  Recording rec;
  rec.sample_rate_hz = rate;
  rec.channels = split_csv(strip_cr(line));
  if (rec.channels.empty() || rec.channels.front().empty())
    throw Error::data(path + ": malformed header: empty channel label row");

  const std::size_t n_channels = rec.channels.size();
  std::vector<std::vector<double>> columns(n_channels);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue; // tolerate a trailing blank line
    ++row;
    const auto fields = split_csv(line);
    if (fields.size() != n_channels)
      throw Error::data(path + ": row " + std::to_string(row) + ": expected " +
                        std::to_string(n_channels) + " fields, got " +
                        std::to_string(fields.size()));
    for (std::size_t c = 0; c < n_channels; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v))
        throw Error::data(path + ": row " + std::to_string(row) + ", field '" +
                          rec.channels[c] + "': non-numeric sample '" +
                          fields[c] + "'");
      if (!std::isfinite(v))
        throw Error::data(path + ": row " + std::to_string(row) + ", field '" +
                          rec.channels[c] + "': non-finite sample");
      columns[c].push_back(v);
    }
  }

  rec.samples.reserve(n_channels);
  for (auto& col : columns)
    rec.samples.emplace_back(
        Eigen::Map<const Eigen::ArrayXd>(col.data(), static_cast<Eigen::Index>(col.size())));
  rec.validate();
  return rec;
}

void save_csv(const Recording& rec, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error::data("cannot write recording file: " + path);
  out << kHeaderPrefix << fmt_double(rec.sample_rate_hz) << "\n";
  for (std::size_t c = 0; c < rec.channels.size(); ++c)
    out << (c ? "," : "") << rec.channels[c];
  out << "\n";
  const Eigen::Index n = rec.sample_count();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < rec.samples.size(); ++c)
      out << (c ? "," : "") << fmt_double(rec.samples[c][i]);
    out << "\n";
  }
  if (!out) throw Error::data("write failed: " + path);
}

Recording load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::data("cannot open recording file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kBinaryMagic, 4) != 0)
    throw Error::data(path + ": malformed header: bad magic");
  std::uint32_t n_channels = 0;
  std::uint64_t n_samples = 0;
  Recording rec;
  in.read(reinterpret_cast<char*>(&rec.sample_rate_hz), sizeof(double));
  in.read(reinterpret_cast<char*>(&n_channels), sizeof(n_channels));
  in.read(reinterpret_cast<char*>(&n_samples), sizeof(n_samples));
  if (!in) throw Error::data(path + ": malformed header: truncated");
  if (!(rec.sample_rate_hz >= 1000.0))
    throw Error::data(path + ": sample_rate_hz below the 1000 Hz minimum");
  for (std::uint32_t c = 0; c < n_channels; ++c) {
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string label(len, '\0');
    in.read(label.data(), len);
    if (!in) throw Error::data(path + ": truncated channel label");
    rec.channels.push_back(label);
  }
  for (std::uint32_t c = 0; c < n_channels; ++c) {
    Eigen::ArrayXd col(static_cast<Eigen::Index>(n_samples));
    in.read(reinterpret_cast<char*>(col.data()),
            static_cast<std::streamsize>(n_samples * sizeof(double)));
    if (!in) throw Error::data(path + ": truncated sample data");
    rec.samples.push_back(std::move(col));
  }
  rec.validate();
  return rec;
}

void save_binary(const Recording& rec, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error::data("cannot write recording file: " + path);
  out.write(kBinaryMagic, 4);
  const std::uint32_t n_channels = static_cast<std::uint32_t>(rec.channels.size());
  const std::uint64_t n_samples = static_cast<std::uint64_t>(rec.sample_count());
  out.write(reinterpret_cast<const char*>(&rec.sample_rate_hz), sizeof(double));
  out.write(reinterpret_cast<const char*>(&n_channels), sizeof(n_channels));
  out.write(reinterpret_cast<const char*>(&n_samples), sizeof(n_samples));
  for (const auto& label : rec.channels) {
    const std::uint32_t len = static_cast<std::uint32_t>(label.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(label.data(), len);
  }
  for (const auto& col : rec.samples)
    out.write(reinterpret_cast<const char*>(col.data()),
              static_cast<std::streamsize>(n_samples * sizeof(double)));
  if (!out) throw Error::data("write failed: " + path);
}

// Paul Kellet's pink-noise filter over seeded white noise. Digital, so the
// 1/f shape holds in normalized frequency at any sample rate.
Eigen::ArrayXd pink_noise(Eigen::Index n, Rng& rng) {
  Eigen::ArrayXd out(n);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  const Eigen::Index warmup = 2048;
  for (Eigen::Index i = -warmup; i < n; ++i) {
    const double white = rng.normal();
    b0 = 0.99886 * b0 + white * 0.0555179;
    b1 = 0.99332 * b1 + white * 0.0750759;
    b2 = 0.96900 * b2 + white * 0.1538520;
    b3 = 0.86650 * b3 + white * 0.3104856;
    b4 = 0.55000 * b4 + white * 0.5329522;
    b5 = -0.7616 * b5 - white * 0.0168980;
    const double pink = b0 + b1 + b2 + b3 + b4 + b5 + b6 + white * 0.5362;
    b6 = white * 0.115926;
    if (i >= 0) out[i] = pink;
  }
  return out;
}

std::pair<double, double> band_limits(SynthBand band) {
  switch (band) {
    case SynthBand::Ripple: return {80.0, 250.0};
    case SynthBand::FastRipple: return {250.0, 500.0};
    case SynthBand::Both: return {80.0, 500.0};
  }
  throw Error::internal("unreachable synth band");
}

} // namespace

const Eigen::ArrayXd& Recording::channel(const std::string& label) const {
  const int idx = channel_index(label);
  if (idx < 0) throw Error::data("unknown channel: " + label);
  return samples[static_cast<std::size_t>(idx)];
}

int Recording::channel_index(const std::string& label) const {
  for (std::size_t i = 0; i < channels.size(); ++i)
    if (channels[i] == label) return static_cast<int>(i);
  return -1;
}

void Recording::validate() const {
  if (channels.size() != samples.size())
    throw Error::data("recording: label/sample column count mismatch");
  if (!(sample_rate_hz >= 1000.0))
    throw Error::data("recording: sample_rate_hz=" + fmt_double(sample_rate_hz) +
                      " is below the 1000 Hz minimum");
  const Eigen::Index n = sample_count();
  for (std::size_t c = 0; c < samples.size(); ++c) {
    if (samples[c].size() != n)
      throw Error::data("recording: channel '" + channels[c] +
                        "' has a different sample count");
    if (!samples[c].isFinite().all())
      throw Error::data("recording: channel '" + channels[c] +
                        "' contains a non-finite sample");
  }
}

const char* to_string(AnnotationKind kind) {
  return kind == AnnotationKind::PlantedHfo ? "planted-HFO" : "labeled-HFO";
}

AnnotationKind annotation_kind_from_string(const std::string& s) {
  if (s == "planted-HFO") return AnnotationKind::PlantedHfo;
  if (s == "labeled-HFO") return AnnotationKind::LabeledHfo;
  throw Error::data("unknown annotation kind: '" + s + "'");
}

const char* to_string(SynthBand band) {
  switch (band) {
    case SynthBand::Ripple: return "ripple";
    case SynthBand::FastRipple: return "fast-ripple";
    case SynthBand::Both: return "both";
  }
  return "?";
}

SynthBand synth_band_from_string(const std::string& s) {
  if (s == "ripple") return SynthBand::Ripple;
  if (s == "fast-ripple" || s == "fast_ripple") return SynthBand::FastRipple;
  if (s == "both") return SynthBand::Both;
  throw Error::config("unknown synth band: '" + s + "'");
}

void SynthSpec::validate() const {
  if (!(duration_s > 0.0)) throw Error::config("synth: duration_s must be positive");
  if (!(sample_rate_hz >= 1000.0))
    throw Error::config("synth: sample_rate_hz must be at least 1000");
  if (noise_floor_uv < 0.0)
    throw Error::config("synth: noise_floor_uv must be non-negative");
  if (noise_floor_uv > 0.0 && duration_s < 1.0)
    throw Error::config(
        "synth: noise calibration needs duration_s >= 1 (baseline window)");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const std::string tag = "synth event " + std::to_string(i);
    if (!(e.amplitude_uv > 0.0))
      throw Error::config(tag + ": amplitude_uv must be positive");
    if (!(e.length_s > 0.0))
      throw Error::config(tag + ": length_s must be positive");
    if (e.time_s < 0.0) throw Error::config(tag + ": time_s must be non-negative");
    if (e.time_s + e.length_s > duration_s)
      throw Error::config(tag + " at t=" + fmt_double(e.time_s) +
                          "s extends past duration_s=" + fmt_double(duration_s));
    const auto [lo, hi] = band_limits(e.band);
    if (e.burst_frequency_hz < lo || e.burst_frequency_hz > hi)
      throw Error::config(tag + ": burst_frequency_hz=" +
                          fmt_double(e.burst_frequency_hz) + " outside the " +
                          std::string(to_string(e.band)) + " band [" +
                          fmt_double(lo) + "," + fmt_double(hi) + "]");
  }
}

SynthResult synthesize_ieeg(const SynthSpec& spec) {
  spec.validate();
  const double fs = spec.sample_rate_hz;
  const Eigen::Index n = static_cast<Eigen::Index>(std::llround(spec.duration_s * fs));

  Rng rng(spec.seed);
  Eigen::ArrayXd x = Eigen::ArrayXd::Zero(n);
  if (spec.noise_floor_uv > 0.0) {
    Eigen::ArrayXd noise = pink_noise(n, rng);
    // Calibrate so the baseline algorithm applied to the first second
    // reports exactly the requested floor.
    const double raw = compute_baseline(noise, fs);
    x = noise * (spec.noise_floor_uv / raw);
  }

  SynthResult result;
  for (const auto& e : spec.events) {
    const Eigen::Index first = static_cast<Eigen::Index>(std::ceil(e.time_s * fs));
    const Eigen::Index last =
        std::min(n - 1, static_cast<Eigen::Index>(std::floor((e.time_s + e.length_s) * fs)));
    for (Eigen::Index i = first; i <= last; ++i) {
      const double u = static_cast<double>(i) / fs - e.time_s;
      const double hann =
          0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u / e.length_s));
      x[i] += e.amplitude_uv * hann *
              std::sin(2.0 * std::numbers::pi * e.burst_frequency_hz * u);
    }
    result.annotations.push_back(EventAnnotation{
        spec.channel, e.time_s, e.time_s + e.length_s, AnnotationKind::PlantedHfo});
  }

  result.recording.sample_rate_hz = fs;
  result.recording.channels = {spec.channel};
  result.recording.samples = {std::move(x)};
  result.recording.validate();
  return result;
}

Recording load_recording(const std::string& path, FileFormat format) {
  return format == FileFormat::Csv ? load_csv(path) : load_binary(path);
}

void save_recording(const Recording& recording, const std::string& path,
                    FileFormat format) {
  recording.validate();
  if (format == FileFormat::Csv)
    save_csv(recording, path);
  else
    save_binary(recording, path);
}

std::vector<EventAnnotation> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error::data("cannot open annotation file: " + path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "channel,start_s,end_s,kind")
    throw Error::data(path + ": malformed annotation header");
  std::vector<EventAnnotation> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    ++row;
    const auto fields = split_csv(line);
    if (fields.size() != 4)
      throw Error::data(path + ": annotation row " + std::to_string(row) +
                        ": expected 4 fields");
    EventAnnotation a;
    a.channel = fields[0];
    if (!parse_double(fields[1], a.start_s) || !parse_double(fields[2], a.end_s))
      throw Error::data(path + ": annotation row " + std::to_string(row) +
                        ": non-numeric time");
    if (!(a.start_s >= 0.0) || !(a.start_s < a.end_s))
      throw Error::data(path + ": annotation row " + std::to_string(row) +
                        ": requires 0 <= start_s < end_s");
    a.kind = annotation_kind_from_string(fields[3]);
    out.push_back(std::move(a));
  }
  return out;
}

void save_annotations(const std::vector<EventAnnotation>& annotations,
                      const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error::data("cannot write annotation file: " + path);
  out << "channel,start_s,end_s,kind\n";
  for (const auto& a : annotations)
    out << a.channel << ',' << fmt_double(a.start_s) << ',' << fmt_double(a.end_s)
        << ',' << to_string(a.kind) << "\n";
  if (!out) throw Error::data("write failed: " + path);
}

Recording merge_channels(const std::vector<Recording>& parts) {
  if (parts.empty()) throw Error::data("merge_channels: no recordings given");
  Recording merged;
  merged.sample_rate_hz = parts.front().sample_rate_hz;
  merged.patient_id = parts.front().patient_id;
  merged.interval_id = parts.front().interval_id;
  for (const auto& part : parts) {
    if (part.sample_rate_hz != merged.sample_rate_hz)
      throw Error::data("merge_channels: sample rates differ");
    if (part.sample_count() != parts.front().sample_count())
      throw Error::data("merge_channels: sample counts differ");
    for (std::size_t c = 0; c < part.channels.size(); ++c) {
      merged.channels.push_back(part.channels[c]);
      merged.samples.push_back(part.samples[c]);
    }
  }
  merged.validate();
  return merged;
}

} // namespace hfo
