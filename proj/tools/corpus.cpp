#include "corpus.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "multiphonic/error.hpp"
#include "multiphonic/wav.hpp"

namespace mph::tools {

namespace {

constexpr double kRate = 48000.0;
constexpr double kDuration = 0.5;

ToneSpec base(ToneKind kind) {
  ToneSpec s;
  s.kind = kind;
  s.render.duration_s = kDuration;
  s.render.rate = kRate;
  return s;
}

std::string trace_row(double t, double hz, double conf) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3f,%.2f,%.2f\n", t, hz, conf);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

std::vector<CorpusTone> corpus_tones() {
  std::vector<CorpusTone> tones;

  auto control = base(ToneKind::Harmonic);
  control.f0_hz = 87.31;
  control.partial_count = 12;
  control.rolloff_db_per_oct = 3.0;
  tones.push_back({"control_f2", control});

  auto chord = base(ToneKind::PowerChord);
  chord.chord = {82.41, false, 2.0, 0.0};
  tones.push_back({"power_chord_e2", chord});

  auto holliger = base(ToneKind::Fm);
  holliger.fm.carrier_hz = 236.0;
  holliger.fm.modulator_hz = 32.0;
  holliger.fm.index = 2.0;
  holliger.fm.harmonic_lock = true;
  tones.push_back({"holliger_fm", holliger});

  auto fire = holliger;
  fire.fm.modulator_hz = 37.8;
  fire.fm.extra_partials = {{301.0, 0.15, 0.0}, {417.0, 0.1, 0.0}};
  tones.push_back({"fire_fm", fire});

  auto bass = base(ToneKind::OddHarmonic);
  bass.f0_hz = 55.0;
  bass.partial_count = 4;
  bass.rolloff_db_per_oct = 0.0;
  tones.push_back({"odd_808", bass});

  auto walter = base(ToneKind::Partials);
  for (double hz : {125.0, 185.0, 252.0, 319.0, 390.0}) walter.partials.push_back({hz, 1.0, 0.0});
  tones.push_back({"walter_inharmonic", walter});

  auto fallow = base(ToneKind::Partials);
  for (int n = 2; n <= 8; ++n) fallow.partials.push_back({98.0 * n, n == 5 ? 1.0 : 0.3, 0.0});
  tones.push_back({"fallowfield_missing_f0", fallow});

  auto sine = base(ToneKind::Fm);
  sine.fm.carrier_hz = 236.0;
  sine.fm.modulator_hz = 32.0;
  sine.fm.index = 0.0;
  tones.push_back({"sine_236", sine});

  return tones;
}

std::vector<CorpusFile> corpus_tables() {
  std::vector<CorpusFile> files;

  files.push_back({"reports/control_f2.csv",
                   "sample_id,listener_id,pitch,certainty,tuning\n"
                   "control_f2,L01,F2,1.0,in-tune\n"
                   "control_f2,L02,F2,1.0,in-tune\n"
                   "control_f2,L02,F3,0.5,in-tune\n"
                   "control_f2,L03,F2,0.8,too-low\n"
                   "control_f2,L04,F2,1.0,in-tune\n"
                   "control_f2,L04,C4,0.3,too-high\n"
                   "control_f2,L05,F2,0.9,in-tune\n"
                   "control_f2,L05,F1,0.4,in-tune\n"
                   "control_f2,L06,F2,1.0,in-tune\n"
                   "control_f2,L07,F3,0.7,in-tune\n"
                   "control_f2,L08,F2,1.0,in-tune\n"
                   "control_f2,L08,A4,0.2,too-low\n"
                   "control_f2,L09,F2,0.6,in-tune\n"
                   "control_f2,L09,F2,0.5,too-high\n"
                   "control_f2,L10,F2,1.0,in-tune\n"
                   "control_f2,L10,G#3,0.3,in-tune\n"});

  files.push_back({"reports/fallowfield_missing_f0.csv",
                   "sample_id,listener_id,pitch,certainty,tuning\n"
                   "fallowfield_missing_f0,L01,B4,1.0,in-tune\n"
                   "fallowfield_missing_f0,L02,B4,0.9,too-low\n"
                   "fallowfield_missing_f0,L03,B4,0.8,in-tune\n"
                   "fallowfield_missing_f0,L04,B3,0.6,in-tune\n"});

  std::string crepe = "time_s,freq_hz,confidence\n";
  for (int i = 0; i < 20; ++i) crepe += trace_row(0.01 * i, i % 2 == 0 ? 87.31 : 174.61, 0.9);
  files.push_back({"traces/crepe_control_f2.csv", crepe});

  std::string pesto = "time_s,freq_hz,confidence\n";
  pesto += trace_row(0.0, 0.0, 0.0);
  for (int i = 1; i <= 20; ++i) pesto += trace_row(0.01 * i, 87.31, 0.85);
  pesto += trace_row(0.21, 0.0, 0.0);
  files.push_back({"traces/pesto_control_f2.csv", pesto});

  std::string outlier = "time_s,freq_hz,confidence\n";
  for (int i = 0; i < 100; ++i) outlier += trace_row(0.01 * i, i % 10 == 9 ? 466.16 : 440.0, i % 10 == 9 ? 0.1 : 0.9);
  files.push_back({"traces/outlier_a4.csv", outlier});

  std::string fallow = "time_s,freq_hz,confidence\n";
  for (int i = 0; i < 40; ++i) fallow += trace_row(0.01 * i, i < 32 ? 98.0 : 490.0, 0.8);
  files.push_back({"traces/crepe_fallowfield_missing_f0.csv", fallow});

  return files;
}

std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  fs::create_directories(root / "tones");
  for (const auto& t : corpus_tones()) {
    const auto spec_json = tone_spec_to_json(t.spec);
    const auto json_path = root / "tones" / (t.id + ".json");
    write_text(json_path, spec_json.dump(2) + "\n");
    written.push_back(json_path);
    const auto wav_path = root / "tones" / (t.id + ".wav");
    write_wav(wav_path, render_tone(t.spec), t.spec.render.rate, SampleFormat::Pcm16, spec_json.dump());
    written.push_back(wav_path);
  }
  for (const auto& f : corpus_tables()) {
    const auto path = root / f.path;
    fs::create_directories(path.parent_path());
    write_text(path, f.content);
    written.push_back(path);
  }
  return written;
}

}  // namespace mph::tools
