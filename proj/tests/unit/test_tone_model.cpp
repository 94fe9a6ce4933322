#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "multiphonic/error.hpp"
#include "multiphonic/tone_model.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using mph::Frequency;
using mph::PitchClass;
using mph::PitchName;

TEST_CASE("frequency rejects non-positive and non-finite values", "[tone-model]") {
  for (double bad : {0.0, -1.0, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN()}) {
    try {
      Frequency f{bad};
      FAIL("accepted " << bad);
    } catch (const mph::Error& e) {
      CHECK(e.code() == mph::ErrorCode::InvalidFrequency);
    }
  }
}

TEST_CASE("freq_to_pitch examples", "[tone-model]") {
  const auto a4 = mph::freq_to_pitch(Frequency{440.0});
  CHECK(a4.note_label() == "A4");
  CHECK_THAT(a4.cents(), WithinAbs(0.0, 1e-9));

  const auto f2 = mph::freq_to_pitch(Frequency{87.31});
  CHECK(f2.note_label() == "F2");
  CHECK_THAT(f2.cents(), WithinAbs(oracle::cents(oracle::et_hz(41), 87.31), 1e-9));
  CHECK_THAT(f2.cents(), WithinAbs(0.0, 0.1));

  const auto as3 = mph::freq_to_pitch(Frequency{236.0});
  CHECK(as3.note_label() == "A#3");
  CHECK_THAT(as3.cents(), WithinAbs(21.5, 0.1));
  CHECK(as3.to_string() == "A#3+21.5ct");
}

TEST_CASE("pitch_to_freq examples", "[tone-model]") {
  CHECK_THAT(mph::pitch_to_freq(PitchName{PitchClass::A, 4}).hz(), WithinAbs(440.0, 1e-9));
  CHECK_THAT(mph::pitch_to_freq(PitchName{PitchClass::A, 3}).hz(), WithinAbs(220.0, 1e-9));
  CHECK_THAT(mph::pitch_to_freq(PitchName{PitchClass::E, 1}).hz(), WithinAbs(41.203, 1e-3));
}

TEST_CASE("cents_between examples", "[tone-model]") {
  CHECK(mph::cents_between(Frequency{440.0}, Frequency{440.0}) == 0.0);
  CHECK_THAT(mph::cents_between(Frequency{220.0}, Frequency{440.0}), WithinAbs(1200.0, 1e-9));
  CHECK_THAT(mph::cents_between(Frequency{233.082}, Frequency{236.0}), WithinAbs(21.5, 0.1));
  CHECK_THAT(mph::cents_between(Frequency{440.0}, Frequency{220.0}), WithinAbs(-1200.0, 1e-9));
}

TEST_CASE("pitch round trip over the audible range", "[tone-model]") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> logf(std::log(20.0), std::log(20000.0));
  for (int i = 0; i < 10000; ++i) {
    const double hz = std::exp(logf(gen));
    const auto p = mph::freq_to_pitch(Frequency{hz});
    REQUIRE(p.cents() >= -50.0);
    REQUIRE(p.cents() <= 50.0);
    REQUIRE_THAT(mph::pitch_to_freq(p).hz(), WithinRel(hz, 1e-6));
    const auto back = mph::freq_to_pitch(mph::pitch_to_freq(p));
    REQUIRE(back.note_label() == p.note_label());
    REQUIRE_THAT(back.cents(), WithinAbs(p.cents(), 1e-6));
  }
}

TEST_CASE("reference pitch shifts the mapping", "[tone-model]") {
  const auto p = mph::freq_to_pitch(Frequency{442.0}, Frequency{442.0});
  CHECK(p.note_label() == "A4");
  CHECK_THAT(p.cents(), WithinAbs(0.0, 1e-9));
  const auto q = mph::freq_to_pitch(Frequency{440.0}, Frequency{442.0});
  CHECK_THAT(q.cents(), WithinAbs(oracle::cents(442.0, 440.0), 1e-9));
}

TEST_CASE("pitch name parsing", "[tone-model]") {
  CHECK(PitchName::parse("F2").note_label() == "F2");
  CHECK(PitchName::parse("Bb2").note_label() == "A#2");
  CHECK(PitchName::parse("G#3").semitone() == 56);
  const auto p = PitchName::parse("A#3+21.5ct");
  CHECK(p.note_label() == "A#3");
  CHECK_THAT(p.cents(), WithinAbs(21.5, 1e-12));
  CHECK(PitchName::parse("C-1").semitone() == 0);
  for (const char* bad : {"", "H2", "C", "A#", "C4+", "C4+12", "Cb"}) {
    CHECK_THROWS_AS(PitchName::parse(bad), mph::Error);
  }
}

TEST_CASE("from_semitone folds cents into the half-open range", "[tone-model]") {
  const auto p = PitchName::from_semitone(60, 75.0);
  CHECK(p.note_label() == "C#4");
  CHECK_THAT(p.cents(), WithinAbs(-25.0, 1e-12));
  const auto q = PitchName::from_semitone(60, -50.0);
  CHECK(q.note_label() == "C4");
  CHECK_THAT(q.cents(), WithinAbs(-50.0, 1e-12));
  const auto r = PitchName::from_semitone(60, 50.0);
  CHECK(r.note_label() == "C#4");
  CHECK_THAT(r.cents(), WithinAbs(-50.0, 1e-12));
}

TEST_CASE("partial invariants", "[tone-model]") {
  CHECK_THROWS_AS(mph::Partial(Frequency{100.0}, -1.0), mph::Error);
  CHECK_THROWS_AS(mph::Partial(Frequency{100.0}, 1.0, 0), mph::Error);
  mph::Partial p{Frequency{100.0}, 2.0, 3};
  CHECK(p.harmonic_index() == 3);
  CHECK_THROWS_AS(p.set_harmonic_index(-2), mph::Error);
}
