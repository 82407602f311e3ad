#include <doctest.h>

#include <fstream>
#include <sstream>

#include "hfo/error.hpp"
#include "hfo/signal_io.hpp"
#include "testing.hpp"

using namespace hfo;
using hfo::testing::TempDir;

namespace {

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

} // namespace

TEST_CASE("csv loader: header arithmetic and channel order") {
  TempDir dir("sio_load");
  std::ostringstream csv;
  csv << "# sample_rate_hz=2000\nAR1-2,AR2-3\n";
  for (int i = 0; i < 2000; ++i) csv << i * 0.5 << "," << -i * 0.25 << "\n";
  write_file(dir.file("rec.csv"), csv.str());

  const Recording rec = load_recording(dir.file("rec.csv"));
  CHECK(rec.sample_rate_hz == 2000.0);
  CHECK(rec.duration_s() == doctest::Approx(1.0));
  REQUIRE(rec.channels == std::vector<std::string>{"AR1-2", "AR2-3"});
  CHECK(rec.samples[0][2] == 1.0);
  CHECK(rec.samples[1][2] == -0.5);
}

TEST_CASE("csv loader: distinct errors name the offending row/field") {
  TempDir dir("sio_err");

  write_file(dir.file("nan.csv"), "# sample_rate_hz=2000\nA,B\n1,2\n3,nan\n");
  const std::string nan_msg =
      message_of([&] { load_recording(dir.file("nan.csv")); });
  CHECK(nan_msg.find("row 2") != std::string::npos);
  CHECK(nan_msg.find("non-finite") != std::string::npos);

  write_file(dir.file("ragged.csv"), "# sample_rate_hz=2000\nA,B\n1,2\n3\n");
  const std::string ragged_msg =
      message_of([&] { load_recording(dir.file("ragged.csv")); });
  CHECK(ragged_msg.find("row 2") != std::string::npos);
  CHECK(ragged_msg.find("expected 2 fields") != std::string::npos);

  write_file(dir.file("alpha.csv"), "# sample_rate_hz=2000\nA,B\n1,x7\n");
  const std::string alpha_msg =
      message_of([&] { load_recording(dir.file("alpha.csv")); });
  CHECK(alpha_msg.find("field 'B'") != std::string::npos);
  CHECK(alpha_msg.find("x7") != std::string::npos);

  write_file(dir.file("slow.csv"), "# sample_rate_hz=500\nA\n1\n");
  CHECK_THROWS_AS(load_recording(dir.file("slow.csv")), Error);

  write_file(dir.file("head.csv"), "sample_rate=2000\nA\n1\n");
  const std::string head_msg =
      message_of([&] { load_recording(dir.file("head.csv")); });
  CHECK(head_msg.find("malformed header") != std::string::npos);
}

TEST_CASE("round-trip save/load is bit-identical") {
  TempDir dir("sio_rt");
  SynthSpec spec;
  spec.duration_s = 1.5;
  spec.noise_floor_uv = 7.5;
  spec.seed = 11;
  spec.events.push_back({1.1, SynthBand::Ripple, 120.0, 20.0, 0.08});
  const Recording rec = synthesize_ieeg(spec).recording;

  for (auto format : {FileFormat::Csv, FileFormat::Binary}) {
    const std::string path =
        dir.file(format == FileFormat::Csv ? "r.csv" : "r.bin");
    save_recording(rec, path, format);
    const Recording back = load_recording(path, format);
    REQUIRE(back.channels == rec.channels);
    CHECK(back.sample_rate_hz == rec.sample_rate_hz);
    REQUIRE(back.sample_count() == rec.sample_count());
    CHECK((back.samples[0] == rec.samples[0]).all());
  }
}

TEST_CASE("annotation sidecar round-trip") {
  TempDir dir("sio_ann");
  std::vector<EventAnnotation> annotations{
      {"CH1", 0.25, 0.35, AnnotationKind::PlantedHfo},
      {"CH1", 1.5, 1.6, AnnotationKind::LabeledHfo},
  };
  save_annotations(annotations, dir.file("a.csv"));
  const auto back = load_annotations(dir.file("a.csv"));
  REQUIRE(back.size() == 2);
  CHECK(back[0].start_s == 0.25);
  CHECK(back[1].kind == AnnotationKind::LabeledHfo);
}

TEST_CASE("synthesis: zero events give pure noise and no annotations") {
  SynthSpec spec;
  spec.duration_s = 2.0;
  spec.noise_floor_uv = 5.0;
  spec.seed = 3;
  const auto result = synthesize_ieeg(spec);
  CHECK(result.annotations.empty());
  CHECK(result.recording.sample_count() == 4000);
  CHECK(result.recording.samples[0].abs().maxCoeff() > 0.0);
}

TEST_CASE("synthesis: burst annotation echoes the spec event") {
  SynthSpec spec;
  spec.duration_s = 1.0;
  spec.noise_floor_uv = 0.0;
  spec.events.push_back({0.3, SynthBand::Ripple, 165.0, 30.0, 0.1});
  const auto result = synthesize_ieeg(spec);
  REQUIRE(result.annotations.size() == 1);
  CHECK(result.annotations[0].start_s == doctest::Approx(0.3));
  CHECK(result.annotations[0].end_s == doctest::Approx(0.4));
  CHECK(result.annotations[0].kind == AnnotationKind::PlantedHfo);
  // Nothing outside the burst, peak near the requested amplitude.
  CHECK(result.recording.samples[0].head(500).abs().maxCoeff() == 0.0);
  CHECK(result.recording.samples[0].abs().maxCoeff() ==
        doctest::Approx(30.0).epsilon(0.05));
}

TEST_CASE("synthesis is a pure function of the spec") {
  SynthSpec spec;
  spec.duration_s = 1.2;
  spec.noise_floor_uv = 4.0;
  spec.seed = 99;
  spec.events.push_back({1.05, SynthBand::FastRipple, 300.0, 12.0, 0.05});
  const auto a = synthesize_ieeg(spec);
  const auto b = synthesize_ieeg(spec);
  CHECK((a.recording.samples[0] == b.recording.samples[0]).all());

  spec.seed = 100;
  const auto c = synthesize_ieeg(spec);
  CHECK_FALSE((a.recording.samples[0] == c.recording.samples[0]).all());
}

TEST_CASE("synthesis: burst energy is band-pure (dense-DFT oracle)") {
  SynthSpec spec;
  spec.duration_s = 1.0;
  spec.noise_floor_uv = 0.0;
  spec.events.push_back({0.45, SynthBand::Ripple, 165.0, 30.0, 0.1});
  const auto result = synthesize_ieeg(spec);
  const double fraction = hfo::testing::band_energy_fraction(
      result.recording.samples[0], spec.sample_rate_hz, 165.0, 20.0);
  CHECK(fraction >= 0.90);
}

TEST_CASE("synthesis: event past duration is rejected with its index") {
  SynthSpec spec;
  spec.duration_s = 1.0;
  spec.noise_floor_uv = 0.0;
  spec.events.push_back({0.2, SynthBand::Ripple, 165.0, 30.0, 0.1});
  spec.events.push_back({0.95, SynthBand::Ripple, 165.0, 30.0, 0.2});
  const std::string msg = message_of([&] { synthesize_ieeg(spec); });
  CHECK(msg.find("event 1") != std::string::npos);
  CHECK(msg.find("past duration") != std::string::npos);
}

TEST_CASE("synthesis: frequency must sit inside the declared band") {
  SynthSpec spec;
  spec.duration_s = 1.0;
  spec.noise_floor_uv = 0.0;
  spec.events.push_back({0.2, SynthBand::FastRipple, 165.0, 30.0, 0.1});
  CHECK_THROWS_AS(synthesize_ieeg(spec), Error);
}

TEST_CASE("merge_channels stacks single-channel recordings") {
  SynthSpec spec;
  spec.duration_s = 1.0;
  spec.noise_floor_uv = 5.0;
  std::vector<Recording> parts;
  for (int i = 0; i < 3; ++i) {
    spec.seed = static_cast<std::uint64_t>(i);
    spec.channel = "CH" + std::to_string(i + 1);
    parts.push_back(synthesize_ieeg(spec).recording);
  }
  const Recording merged = merge_channels(parts);
  CHECK(merged.channels == std::vector<std::string>{"CH1", "CH2", "CH3"});
  CHECK(merged.samples.size() == 3);
  CHECK((merged.samples[2] == parts[2].samples[0]).all());
}
