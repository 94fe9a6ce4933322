#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "multiphonic/error.hpp"
#include "multiphonic/harmonicity.hpp"
#include "multiphonic/spectral.hpp"
#include "multiphonic/synthesis.hpp"
#include "multiphonic/temporal.hpp"
#include "oracles.hpp"
#include "roundtrip.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using mph::Frequency;

namespace {

constexpr double kRate = 48000.0;

mph::RenderOptions render(double seconds = 0.25) {
  mph::RenderOptions r;
  r.duration_s = seconds;
  r.rate = kRate;
  return r;
}

std::vector<mph::Partial> analyse(const std::vector<double>& x, double floor_db = 60.0) {
  mph::PeakConfig peaks;
  peaks.relative_floor_db = floor_db;
  return mph::extract_partials(mph::compute_power_spectrum(x, kRate), peaks);
}

double peak_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double db(double p) { return 10.0 * std::log10(p); }

}  // namespace

TEST_CASE("single partial resynthesis is a sine at -3 dBFS", "[synthesis]") {
  const mph::PartialSet ps{{440.0, 1.0, 0.0}};
  const auto x = mph::resynthesize_partials(ps, 0.25, kRate);
  REQUIRE(x.size() == 12000);
  CHECK_THAT(peak_abs(x), WithinAbs(std::pow(10.0, -3.0 / 20.0), 1e-9));
  const auto parts = analyse(x);
  REQUIRE(parts.size() == 1);
  CHECK_THAT(parts[0].hz(), WithinAbs(440.0, 0.5));
}

TEST_CASE("empty partial set renders silence", "[synthesis]") {
  const auto x = mph::resynthesize_partials({}, 0.1, kRate);
  REQUIRE(x.size() == 4800);
  CHECK(peak_abs(x) == 0.0);
}

TEST_CASE("resynthesis rejects partials at Nyquist", "[synthesis]") {
  const mph::PartialSet ps{{24000.0, 1.0, 0.0}};
  CHECK_THROWS_AS(mph::resynthesize_partials(ps, 0.1, kRate), mph::Error);
}

TEST_CASE("resynthesis round trip over random partial sets", "[synthesis]") {
  std::mt19937_64 gen(2024);
  int passed = 0;
  double worst_hz = 0.0, worst_db = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto ps = roundtrip::random_set(gen);
    const auto outcome = roundtrip::check(ps);
    INFO("trial " << trial << ": " << outcome.detail);
    CHECK(outcome.ok);
    if (outcome.ok) ++passed;
    worst_hz = std::max(worst_hz, outcome.max_hz_error);
    worst_db = std::max(worst_db, outcome.max_db_error);
  }
  INFO("worst frequency error " << worst_hz << " Hz, worst power error " << worst_db << " dB");
  CHECK(passed == 100);
}

TEST_CASE("harmonic tone f0 is recovered by the fit", "[synthesis]") {
  const auto x = mph::generate_harmonic_tone(Frequency{87.31}, 12, 3.0, render());
  const auto fit = mph::fit_least_deviating_series(analyse(x));
  CHECK_THAT(fit.f0.hz(), WithinAbs(87.31, 0.2));
}

TEST_CASE("harmonic tone with one partial is a pure sine", "[synthesis]") {
  const auto x = mph::generate_harmonic_tone(Frequency{300.0}, 1, 3.0, render());
  const auto ref = mph::resynthesize_partials(mph::PartialSet{{300.0, 1.0, 0.0}}, 0.25, kRate);
  REQUIRE(x.size() == ref.size());
  for (std::size_t i = 0; i < x.size(); ++i) REQUIRE_THAT(x[i], WithinAbs(ref[i], 1e-12));
}

TEST_CASE("flat harmonic tone has equal partial powers", "[synthesis]") {
  const auto parts = analyse(mph::generate_harmonic_tone(Frequency{100.0}, 5, 0.0, render()));
  REQUIRE(parts.size() == 5);
  for (const auto& p : parts) CHECK_THAT(db(p.power()) - db(parts[0].power()), WithinAbs(0.0, 0.5));
}

TEST_CASE("rolloff amplitudes", "[synthesis]") {
  const std::vector<int> m{1, 2, 4};
  const auto a = mph::rolloff_amplitudes(m, 6.0);
  CHECK_THAT(a[0], WithinAbs(1.0, 1e-12));
  CHECK_THAT(20.0 * std::log10(a[1]), WithinAbs(-6.0, 1e-9));
  CHECK_THAT(20.0 * std::log10(a[2]), WithinAbs(-12.0, 1e-9));
}

TEST_CASE("odd-harmonic tone examples", "[synthesis]") {
  const auto parts = analyse(mph::generate_odd_harmonic_tone(Frequency{55.0}, 4, 0.0, render()));
  REQUIRE(parts.size() == 4);
  const double expected[] = {55.0, 165.0, 275.0, 385.0};
  for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(parts[i].hz(), WithinAbs(expected[i], 0.5));
  const auto profile = mph::partial_spacings(parts);
  CHECK_THAT(profile.center, WithinRel(110.0, 0.01));
  CHECK_THAT(profile.center / parts[0].hz(), WithinAbs(2.0, 0.01));

  const auto sine = analyse(mph::generate_odd_harmonic_tone(Frequency{55.0}, 1, 0.0, render()));
  REQUIRE(sine.size() == 1);
  CHECK_THAT(sine[0].hz(), WithinAbs(55.0, 0.5));
}

TEST_CASE("power chord produces the combination tone", "[synthesis]") {
  const auto x = mph::generate_power_chord({82.41, false, 2.0, 0.0}, render());
  const auto parts = analyse(x);
  CHECK(std::any_of(parts.begin(), parts.end(), [](const auto& p) { return std::abs(p.hz() - 41.2) <= 1.0; }));
  const auto est = mph::autocorrelation_f0(std::span<const double>(x).first(8192), kRate, {20.0, 200.0});
  REQUIRE(est);
  CHECK_THAT(est->frequency.hz(), WithinRel(41.2, 0.03));
}

TEST_CASE("undriven power chord stays linear", "[synthesis]") {
  const auto two = analyse(mph::generate_power_chord({82.41, false, 0.0, 0.0}, render()), 80.0);
  REQUIRE(two.size() == 2);
  CHECK_THAT(two[0].hz(), WithinAbs(82.41, 0.5));
  CHECK_THAT(two[1].hz(), WithinAbs(123.615, 0.5));
  const auto three = analyse(mph::generate_power_chord({82.41, true, 0.0, 0.0}, render()), 80.0);
  CHECK(three.size() == 3);
}

TEST_CASE("driven power chord on 100 Hz fits a 50 Hz series", "[synthesis]") {
  // The 50 Hz difference tone is itself a partial, so the chord tones sit on harmonics 2 and 3.
  const auto parts = analyse(mph::generate_power_chord({100.0, false, 2.0, 0.0}, render()));
  const auto fit = mph::fit_least_deviating_series(parts);
  CHECK_THAT(fit.f0.hz(), WithinRel(50.0, 0.01));
  std::vector<double> hz;
  for (const auto& p : parts) hz.push_back(p.hz());
  const auto brute = oracle::brute_series(hz, 35.0, 20.0, 2000.0);
  REQUIRE(brute);
  CHECK_THAT(fit.f0.hz(), WithinRel(brute->f0, 0.01));
  const auto harmonic_near = [&](double hz) {
    for (const auto& a : fit.assignments) {
      if (std::abs(parts[a.partial_index].hz() - hz) <= 1.0) return a.harmonic;
    }
    return 0;
  };
  CHECK(harmonic_near(100.0) == 2);
  CHECK(harmonic_near(150.0) == 3);
}

TEST_CASE("asymmetric drive adds even products without DC", "[synthesis]") {
  const auto x = mph::generate_power_chord({100.0, false, 2.0, 0.3}, render());
  double mean = 0.0;
  for (double v : x) mean += v;
  CHECK_THAT(mean / static_cast<double>(x.size()), WithinAbs(0.0, 1e-12));
  const auto parts = analyse(x);
  CHECK(std::any_of(parts.begin(), parts.end(), [](const auto& p) { return std::abs(p.hz() - 200.0) <= 1.0; }));
}

TEST_CASE("waveshaper maps full scale to full scale", "[synthesis]") {
  std::vector<double> x{-1.0, -0.5, 0.0, 0.5, 1.0};
  auto y = x;
  mph::waveshape(y, 2.0);
  CHECK_THAT(y[0], WithinAbs(-1.0, 1e-12));
  CHECK_THAT(y[2], WithinAbs(0.0, 1e-12));
  CHECK_THAT(y[4], WithinAbs(1.0, 1e-12));
  CHECK_THAT(y[3], WithinAbs(std::tanh(1.0) / std::tanh(2.0), 1e-12));
  auto z = x;
  mph::waveshape(z, 0.0);
  CHECK(z == x);
  CHECK_THROWS_AS(mph::waveshape(z, -1.0), mph::Error);
}

TEST_CASE("FM with zero index is a pure carrier sine", "[synthesis]") {
  mph::FmParams p;
  p.index = 0.0;
  const auto parts = analyse(mph::generate_fm_tone(p, render()));
  REQUIRE(parts.size() == 1);
  CHECK_THAT(parts[0].hz(), WithinAbs(236.0, 0.5));
}

TEST_CASE("FM analogue sidebands are spaced by the modulator", "[synthesis]") {
  mph::FmParams p;
  p.harmonic_lock = true;
  const auto parts = analyse(mph::generate_fm_tone(p, render()));
  REQUIRE(parts.size() >= 4);
  CHECK_THAT(mph::partial_spacings(parts).center, WithinAbs(32.0, 1.0));
}

TEST_CASE("FM lattice follows Bessel magnitudes on integer ratios", "[synthesis]") {
  mph::FmParams p{256.0, 32.0, 2.0, 0.0, true, {}};
  const auto ps = mph::fm_lattice_partials(p, kRate);
  for (const auto& s : ps) {
    const double k = std::round((s.hz - 256.0) / 32.0);
    CHECK_THAT(s.amplitude, WithinAbs(std::abs(std::cyl_bessel_j(std::abs(k), 2.0)), 1e-12));
  }
  CHECK(std::any_of(ps.begin(), ps.end(), [](const auto& s) { return s.hz == 256.0; }));
}

TEST_CASE("Nyquist guards", "[synthesis]") {
  mph::FmParams p;
  p.carrier_hz = 23900.0;
  CHECK_THROWS_AS(mph::generate_fm_tone(p, render()), mph::Error);
  CHECK_THROWS_AS(mph::generate_harmonic_tone(Frequency{3000.0}, 8, 0.0, render()), mph::Error);
  CHECK_THROWS_AS(mph::generate_power_chord({6000.0, false, 2.0, 0.0}, render()), mph::Error);
  CHECK_NOTHROW(mph::generate_power_chord({6000.0, false, 0.0, 0.0}, render()));
}

TEST_CASE("phase seed is deterministic and changes the waveform", "[synthesis]") {
  auto r1 = render(0.05);
  r1.phase_seed = 9;
  const auto a = mph::generate_harmonic_tone(Frequency{100.0}, 6, 3.0, r1);
  const auto b = mph::generate_harmonic_tone(Frequency{100.0}, 6, 3.0, r1);
  CHECK(a == b);
  auto r2 = r1;
  r2.phase_seed = 10;
  CHECK(mph::generate_harmonic_tone(Frequency{100.0}, 6, 3.0, r2) != a);
}

TEST_CASE("tone spec JSON round trip and validation", "[synthesis]") {
  mph::ToneSpec spec;
  spec.kind = mph::ToneKind::Fm;
  spec.fm.modulator_hz = 37.8;
  spec.fm.harmonic_lock = true;
  spec.fm.extra_partials = {{301.0, 0.15, 0.0}};
  spec.render.duration_s = 0.5;
  spec.render.phase_seed = 4;
  const auto j = mph::tone_spec_to_json(spec);
  CHECK(j.at("schema_version") == "1.0");
  CHECK(j.at("kind") == "fm");
  const auto back = mph::tone_spec_from_json(j);
  CHECK(mph::tone_spec_to_json(back) == j);
  CHECK(mph::render_tone(back) == mph::render_tone(spec));

  auto unknown = j;
  unknown["colour"] = "blue";
  CHECK_THROWS_AS(mph::tone_spec_from_json(unknown), mph::Error);

  auto bad = spec;
  bad.fm.carrier_hz = 30000.0;
  bad.render.duration_s = -1.0;
  try {
    mph::validate_tone_spec(bad);
    FAIL("invalid spec accepted");
  } catch (const mph::Error& e) {
    CHECK(e.code() == mph::ErrorCode::InvalidSpec);
    const std::string msg = e.what();
    CHECK(msg.find("carrier_hz") != std::string::npos);
    CHECK(msg.find("duration_s") != std::string::npos);
  }
}
