#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "multiphonic/error.hpp"
#include "multiphonic/tracker.hpp"

using Catch::Matchers::WithinAbs;
using mph::Frequency;
using mph::PitchName;

namespace {

mph::TrackerTrace parse(const std::string& csv, double threshold = mph::kDefaultVoicingThreshold) {
  std::istringstream in(csv);
  return mph::load_tracker_trace(in, "test", threshold);
}

mph::TrackerTrace trace(const std::vector<std::pair<double, double>>& hz_conf) {
  std::vector<mph::TraceFrame> frames;
  for (std::size_t i = 0; i < hz_conf.size(); ++i) {
    frames.push_back({0.01 * static_cast<double>(i), hz_conf[i].first, hz_conf[i].second, false});
  }
  return mph::make_trace("test", std::move(frames));
}

mph::TrackerTrace alternating(int n) {
  std::vector<std::pair<double, double>> f;
  for (int i = 0; i < n; ++i) f.push_back({i % 2 == 0 ? 87.31 : 174.61, 0.9});
  return trace(f);
}

struct Tone {
  std::vector<mph::Partial> partials;
  mph::HarmonicFit fit;
};

Tone f2_tone() {
  Tone t;
  for (int n = 1; n <= 8; ++n) t.partials.emplace_back(Frequency{87.31 * n}, n == 1 ? 1.0 : 0.2);
  t.fit = mph::assign_harmonic_numbers(t.partials, Frequency{87.31});
  return t;
}

mph::PerceptionAggregate listeners_report(const Tone& tone, std::initializer_list<const char*> pitches) {
  std::vector<mph::ListenerReport> r;
  int i = 0;
  for (const char* p : pitches) r.push_back({"s", "L" + std::to_string(++i), PitchName::parse(p), 1.0, mph::Tuning::InTune, 0});
  return mph::aggregate_perception(r, tone.fit, tone.partials);
}

}  // namespace

TEST_CASE("load_tracker_trace examples", "[tracker]") {
  const auto t = parse("time_s,freq_hz,confidence\n0.00,440,0.9\n0.01,440,0.9\n0.02,440,0.9\n");
  CHECK(t.frames.size() == 3);
  CHECK(t.voiced_count() == 3);
  CHECK(t.tracker_name == "test");

  const auto u = parse("time_s,freq_hz,confidence\n0.00,0,0\n0.01,440,0.9\n");
  REQUIRE(u.frames.size() == 2);
  CHECK_FALSE(u.frames[0].voiced);
  CHECK(u.frames[1].voiced);

  try {
    parse("time_s,freq_hz,confidence\n0.00,440,0.9\n0.02,440,0.9\n0.01,440,0.9\n0.00,440,0.9\n");
    FAIL("decreasing time accepted");
  } catch (const mph::RowError& e) {
    CHECK(e.row() == 4);
  }
  CHECK_THROWS_AS(parse("time_s,freq_hz,confidence\n0.00,440,1.5\n"), mph::RowError);
  CHECK_THROWS_AS(parse("time_s,freq_hz,confidence\n0.00,-440,0.9\n"), mph::RowError);
  CHECK_THROWS_AS(parse("time_s,freq_hz,confidence\n0.00,0,0.9\n"), mph::RowError);
  CHECK_THROWS_AS(parse("t,f,c\n"), mph::RowError);
  CHECK(parse("time_s,freq_hz,confidence\n").frames.empty());
}

TEST_CASE("constant trace has a single mode", "[tracker]") {
  const auto d = mph::aggregate_trace_distribution(trace({{440, 0.9}, {440, 0.8}, {440, 0.7}}));
  REQUIRE(d);
  REQUIRE(d->modes.size() == 1);
  CHECK(d->modes[0].pitch.note_label() == "A4");
  CHECK_THAT(d->modes[0].mass, WithinAbs(1.0, 1e-12));
  CHECK(d->voiced_frames == 3);
}

TEST_CASE("alternating octave trace splits mass evenly", "[tracker]") {
  const auto d = mph::aggregate_trace_distribution(alternating(20));
  REQUIRE(d);
  REQUIRE(d->modes.size() == 2);
  CHECK(d->modes[0].pitch.note_label() == "F2");
  CHECK(d->modes[1].pitch.note_label() == "F3");
  CHECK_THAT(d->modes[0].mass, WithinAbs(0.5, 1e-6));
  CHECK_THAT(d->modes[1].mass, WithinAbs(0.5, 1e-6));
}

TEST_CASE("low-confidence outliers carry little mass", "[tracker]") {
  std::vector<std::pair<double, double>> f;
  for (int i = 0; i < 100; ++i) f.push_back(i % 10 == 9 ? std::pair{466.16, 0.1} : std::pair{440.0, 0.9});
  auto t = trace(f);
  t = mph::make_trace("test", t.frames, 0.0);
  const auto d = mph::aggregate_trace_distribution(t);
  REQUIRE(d);
  REQUIRE(d->modes.size() == 2);
  CHECK(d->modes[1].pitch.note_label() == "A#4");
  CHECK_THAT(d->modes[1].mass, WithinAbs(0.1 * 0.1 / (0.1 * 0.1 + 0.9 * 0.9), 1e-9));
  const auto unweighted = mph::aggregate_trace_distribution(t, false);
  CHECK_THAT(unweighted->modes[1].mass, WithinAbs(0.1, 1e-9));
  const auto gated = mph::aggregate_trace_distribution(trace(f));
  REQUIRE(gated->modes.size() == 1);
}

TEST_CASE("unvoiced trace has no distribution", "[tracker]") {
  CHECK_FALSE(mph::aggregate_trace_distribution(trace({{0.0, 0.0}, {440.0, 0.2}})));
}

TEST_CASE("octave jump detection", "[tracker]") {
  CHECK(mph::detect_octave_jumps(trace({{440, 0.9}, {440, 0.9}, {440, 0.9}})).empty());
  for (int n : {2, 5, 20}) CHECK(mph::detect_octave_jumps(alternating(n)).size() == static_cast<std::size_t>(n - 1));
  CHECK(mph::detect_octave_jumps(trace({{440, 0.9}, {466, 0.9}})).empty());
  const auto two = mph::detect_octave_jumps(trace({{110, 0.9}, {440, 0.9}}));
  REQUIRE(two.size() == 1);
  CHECK_THAT(two[0].interval_cents, WithinAbs(2400.0, 1e-9));
  CHECK(mph::detect_octave_jumps(trace({{100, 0.9}, {207, 0.9}})).empty());
  CHECK(mph::detect_octave_jumps(trace({{100, 0.9}, {207, 0.9}}), 70.0).size() == 1);
  // Unvoiced frames between two voiced ones do not break the pair.
  CHECK(mph::detect_octave_jumps(trace({{100, 0.9}, {0, 0.0}, {200, 0.9}})).size() == 1);
}

TEST_CASE("overlap with perception", "[tracker]") {
  const auto tone = f2_tone();
  std::vector<std::pair<double, double>> constant(10, {87.31, 0.9});
  const auto all_f0 = *mph::aggregate_trace_distribution(trace(constant));
  const auto f0_only = listeners_report(tone, {"F2", "F2", "F2"});
  const auto c1 = mph::compare_distributions(all_f0, &f0_only, tone.fit, tone.partials);
  REQUIRE(c1.overlap);
  CHECK_THAT(*c1.overlap, WithinAbs(1.0, 1e-12));
  REQUIRE(c1.modes.size() == 1);
  CHECK(c1.modes[0].association.label == "f0");
  CHECK(c1.modes[0].perceived);

  const auto split = *mph::aggregate_trace_distribution(alternating(20));
  const auto c2 = mph::compare_distributions(split, &f0_only, tone.fit, tone.partials);
  CHECK_THAT(*c2.overlap, WithinAbs(0.5, 1e-12));

  const auto c3 = mph::compare_distributions(split, nullptr, tone.fit, tone.partials);
  CHECK_FALSE(c3.overlap);
  CHECK(c3.modes.size() == 2);
}

TEST_CASE("missing fundamental fixture overlap", "[tracker]") {
  // Tracker follows the absent 98 Hz fundamental for 32 of 40 frames; listeners hear harmonic 5 (B4)
  // and one hears B3. Only the 490 Hz frames (8 / 40) land on a reported pitch.
  Tone tone;
  for (int n = 2; n <= 8; ++n) tone.partials.emplace_back(Frequency{98.0 * n}, n == 5 ? 1.0 : 0.09);
  tone.fit = mph::assign_harmonic_numbers(tone.partials, Frequency{98.0});
  std::vector<std::pair<double, double>> f;
  for (int i = 0; i < 40; ++i) f.push_back({i < 32 ? 98.0 : 490.0, 0.8});
  const auto d = *mph::aggregate_trace_distribution(trace(f));
  const auto perception = listeners_report(tone, {"B4", "B4", "B4", "B3"});
  const auto c = mph::compare_distributions(d, &perception, tone.fit, tone.partials);
  CHECK_THAT(*c.overlap, WithinAbs(0.2, 1e-12));
  CHECK(c.modes[0].association.label == "f0");
  CHECK(c.modes[1].association.label == "h5");
}
