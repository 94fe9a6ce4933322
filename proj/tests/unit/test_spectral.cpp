#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "multiphonic/error.hpp"
#include "multiphonic/spectral.hpp"
#include "multiphonic/synthesis.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using mph::Frequency;

namespace {

constexpr double kRate = 48000.0;

std::vector<double> tone(const std::vector<std::pair<double, double>>& parts, std::size_t n = 8192) {
  return oracle::sines(parts, kRate, n);
}

double db(double p) { return 10.0 * std::log10(p); }

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_CASE("single sine gives one peak at its frequency", "[spectral]") {
  const auto s = mph::compute_power_spectrum(tone({{440.0, 0.5}}), kRate);
  const auto parts = mph::extract_partials(s);
  REQUIRE(parts.size() == 1);
  CHECK_THAT(parts[0].hz(), WithinAbs(440.0, 0.5));
}

TEST_CASE("equal sines give equal peak powers", "[spectral]") {
  const auto s = mph::compute_power_spectrum(tone({{100.0, 0.3}, {300.0, 0.3}}), kRate);
  const auto parts = mph::extract_partials(s);
  REQUIRE(parts.size() == 2);
  CHECK_THAT(parts[0].hz(), WithinAbs(100.0, 0.5));
  CHECK_THAT(parts[1].hz(), WithinAbs(300.0, 0.5));
  CHECK_THAT(db(parts[0].power()) - db(parts[1].power()), WithinAbs(0.0, 0.5));
}

TEST_CASE("silence gives all-zero bins and no partials", "[spectral]") {
  const std::vector<double> zeros(8192, 0.0);
  const auto s = mph::compute_power_spectrum(zeros, kRate);
  CHECK(std::all_of(s.powers().begin(), s.powers().end(), [](double p) { return p == 0.0; }));
  CHECK(mph::extract_partials(s).empty());
}

TEST_CASE("spectrum invariants", "[spectral]") {
  const auto s = mph::compute_power_spectrum(tone({{440.0, 0.5}}), kRate);
  CHECK(s.size() == 8192 * 4 / 2 + 1);
  CHECK(s.kind() == mph::SpectrumKind::Raw);
  CHECK_THAT(s.bin_spacing(), WithinRel(kRate / (8192.0 * 4.0), 1e-12));
  const auto f = s.frequencies();
  CHECK(std::adjacent_find(f.begin(), f.end(), std::greater_equal<>()) == f.end());
  CHECK(std::all_of(s.powers().begin(), s.powers().end(), [](double p) { return p >= 0.0; }));
  CHECK_THROWS_AS(mph::Spectrum({1.0, 2.0}, {1.0}, kRate, 8192, mph::SpectrumKind::Raw), mph::Error);
  CHECK_THROWS_AS(mph::Spectrum({2.0, 1.0}, {1.0, 1.0}, kRate, 8192, mph::SpectrumKind::Raw), mph::Error);
  CHECK_THROWS_AS(mph::Spectrum({1.0, 2.0}, {1.0, -1.0}, kRate, 8192, mph::SpectrumKind::Raw), mph::Error);
}

TEST_CASE("Parseval: bin powers sum to windowed frame energy", "[spectral]") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (auto shape : {mph::WindowShape::Hann, mph::WindowShape::BlackmanHarris}) {
    mph::WindowConfig cfg;
    cfg.window_length = 2048;
    cfg.zero_pad_factor = 2;
    cfg.shape = shape;
    const auto w = mph::make_window(shape, cfg.window_length);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(cfg.window_length);
      for (auto& v : x) v = noise(gen);
      double energy = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) energy += (x[i] * w[i]) * (x[i] * w[i]);
      const auto s = mph::compute_power_spectrum(x, kRate, cfg);
      REQUIRE_THAT(s.total_power(), WithinRel(energy, 1e-9));
    }
  }
}

TEST_CASE("window config validation", "[spectral]") {
  mph::WindowConfig cfg;
  cfg.window_length = 1000;
  CHECK_THROWS_AS(cfg.validate(), mph::Error);
  cfg.window_length = 512;
  CHECK_THROWS_AS(cfg.validate(), mph::Error);
  cfg.window_length = 4096;
  cfg.zero_pad_factor = 0;
  CHECK_THROWS_AS(cfg.validate(), mph::Error);
  cfg.zero_pad_factor = 1;
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(mph::parse_window_shape("triangle"), mph::Error);
  CHECK(mph::parse_window_shape("hann") == mph::WindowShape::Hann);
}

TEST_CASE("short frame is insufficient data", "[spectral]") {
  const std::vector<double> x(2400, 0.1);
  try {
    mph::compute_power_spectrum(x, kRate);
    FAIL("accepted a short frame");
  } catch (const mph::Error& e) {
    CHECK(e.code() == mph::ErrorCode::InsufficientData);
  }
}

TEST_CASE("multi-frame averaging equals the mean of single frames", "[spectral]") {
  const auto x = tone({{440.0, 0.5}, {523.0, 0.2}}, 8192 + 2 * 2048);
  mph::WindowConfig cfg;
  cfg.frames = 3;
  const auto avg = mph::compute_power_spectrum(x, kRate, cfg);
  mph::WindowConfig one;
  double sum = 0.0;
  for (std::size_t f = 0; f < 3; ++f) {
    const auto s = mph::compute_power_spectrum(std::span<const double>(x).subspan(f * 2048), kRate, one);
    sum += s.total_power();
  }
  CHECK_THAT(avg.total_power(), WithinRel(sum / 3.0, 1e-9));
}

TEST_CASE("ISO 226 anchor values match the tabulated contour", "[spectral]") {
  const auto anchors = mph::iso226_anchor_frequencies();
  REQUIRE(anchors.size() == oracle::kIsoFreq.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    CHECK_THAT(anchors[i], WithinAbs(oracle::kIsoFreq[i], 1e-9));
    CHECK_THAT(mph::iso226_spl_at_anchor(i, 50.0), WithinAbs(oracle::kIso50Phon[i], 0.01));
  }
}

TEST_CASE("weighting leaves 1 kHz unchanged and follows the 50-phon contour", "[spectral]") {
  const auto contour = mph::LoudnessContour::iso226(50.0);
  CHECK(contour.gain_db(1000.0) == 0.0);
  CHECK_THAT(contour.gain_db(50.0), WithinAbs(-(oracle::iso50_spl(50.0) - 50.0), 0.5));
  CHECK_THAT(contour.gain_db(50.0), WithinAbs(oracle::iso50_gain_db(50.0), 0.5));
  CHECK(contour.gain_db(200.0) > contour.gain_db(100.0));
  CHECK_THROWS_AS(contour.spl_at(10.0), mph::Error);

  std::vector<double> f = {100.0, 200.0, 1000.0};
  std::vector<double> p = {1.0, 1.0, 3.0};
  const mph::Spectrum raw(f, p, kRate, 8192, mph::SpectrumKind::Raw);
  const auto w = mph::apply_equal_loudness_weighting(raw, contour);
  CHECK(w.kind() == mph::SpectrumKind::Weighted);
  CHECK(w.powers()[2] == 3.0);
  CHECK(w.powers()[1] >= w.powers()[0]);
  REQUIRE(w.has_applied_gain());
  CHECK_THAT(w.powers()[0] / p[0], WithinRel(w.applied_gain()[0], 1e-12));
  CHECK_THROWS_AS(mph::apply_equal_loudness_weighting(w, contour), mph::Error);
}

TEST_CASE("loudness contour interpolation is monotone between anchors", "[spectral]") {
  const auto contour = mph::LoudnessContour::iso226(50.0);
  // SPL falls monotonically from 20 Hz to 800 Hz; the interpolant must not overshoot.
  double prev = contour.spl_at(20.0);
  for (double hz = 21.0; hz <= 800.0; hz *= 1.01) {
    const double v = contour.spl_at(hz);
    REQUIRE(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("smoothing a flat spectrum leaves it unchanged", "[spectral]") {
  std::vector<double> f(512), p(512, 2.5);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.5 * static_cast<double>(i);
  const mph::Spectrum s(f, p, kRate, 8192, mph::SpectrumKind::Raw);
  const auto sm = mph::smooth_spectrum(s, 64.0);
  CHECK(sm.kind() == mph::SpectrumKind::Smoothed);
  for (double v : sm.powers()) REQUIRE_THAT(v, WithinRel(2.5, 1e-6));
}

TEST_CASE("smoothing an impulse conserves total power", "[spectral]") {
  std::vector<double> f(512), p(512, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.5 * static_cast<double>(i);
  p[256] = 10.0;
  const mph::Spectrum s(f, p, kRate, 8192, mph::SpectrumKind::Raw);
  const auto sm = mph::smooth_spectrum(s, 30.0);
  CHECK_THAT(sm.total_power(), WithinRel(10.0, 0.01));
  CHECK(argmax(sm.powers()) == 256);
  CHECK(sm.powers()[250] > 0.0);
  CHECK_THROWS_AS(mph::smooth_spectrum(s, 1.0), mph::Error);
}

TEST_CASE("smoothed sideband comb peaks at the carrier", "[spectral]") {
  std::vector<std::pair<double, double>> parts;
  for (int k = -3; k <= 3; ++k) parts.push_back({236.0 + 32.0 * k, std::pow(0.6, std::abs(k))});
  const auto s = mph::compute_power_spectrum(tone(parts), kRate);
  const auto sm = mph::smooth_spectrum(s, 64.0);
  const double peak = sm.frequencies()[argmax(sm.powers())];
  CHECK_THAT(peak, WithinAbs(236.0, 5.0));
}

TEST_CASE("harmonic tone partials land on multiples of f0", "[spectral]") {
  std::vector<std::pair<double, double>> parts;
  for (int n = 1; n <= 10; ++n) parts.push_back({87.31 * n, 0.08});
  const auto s = mph::compute_power_spectrum(tone(parts), kRate);
  const auto found = mph::extract_partials(s);
  REQUIRE(found.size() == 10);
  for (int n = 1; n <= 10; ++n) CHECK_THAT(found[static_cast<std::size_t>(n - 1)].hz(), WithinAbs(87.31 * n, 0.5));
}

TEST_CASE("odd-harmonic tone has no partial near the missing even harmonic", "[spectral]") {
  mph::RenderOptions render;
  render.duration_s = 0.25;
  const auto x = mph::generate_odd_harmonic_tone(Frequency{55.0}, 4, 0.0, render);
  const auto found = mph::extract_partials(mph::compute_power_spectrum(x, kRate));
  REQUIRE(found.size() == 4);
  const double expected[] = {55.0, 165.0, 275.0, 385.0};
  for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(found[i].hz(), WithinAbs(expected[i], 0.5));
  CHECK(std::none_of(found.begin(), found.end(), [](const mph::Partial& p) { return std::abs(p.hz() - 110.0) < 10.0; }));
}

TEST_CASE("peaks are found at true frequency on a weighted spectrum", "[spectral]") {
  const auto raw = mph::compute_power_spectrum(tone({{41.2, 0.5}, {82.41, 0.5}}), kRate);
  const auto w = mph::apply_equal_loudness_weighting(raw);
  const auto found = mph::extract_partials(w);
  REQUIRE(found.size() == 2);
  CHECK_THAT(found[0].hz(), WithinAbs(41.2, 0.5));
  CHECK_THAT(found[1].hz(), WithinAbs(82.41, 0.5));
  const auto contour = mph::LoudnessContour::iso226();
  const double expected_db = contour.gain_db(41.2) - contour.gain_db(82.41);
  CHECK_THAT(db(found[0].power()) - db(found[1].power()), WithinAbs(expected_db, 0.5));
}

TEST_CASE("peak config limits and floor", "[spectral]") {
  std::vector<std::pair<double, double>> parts;
  for (int n = 1; n <= 10; ++n) parts.push_back({200.0 * n, std::pow(10.0, -0.4 * n)});
  const auto s = mph::compute_power_spectrum(tone(parts), kRate);
  mph::PeakConfig cfg;
  cfg.max_partials = 3;
  const auto top = mph::extract_partials(s, cfg);
  REQUIRE(top.size() == 3);
  CHECK_THAT(top[0].hz(), WithinAbs(200.0, 0.5));
  CHECK_THAT(top[2].hz(), WithinAbs(600.0, 0.5));
  mph::PeakConfig floor;
  floor.relative_floor_db = 30.0;
  // Amplitudes fall 8 dB per partial, so only four clear a 30 dB floor.
  CHECK(mph::extract_partials(s, floor).size() == 4);
  mph::PeakConfig bad;
  bad.max_partials = 0;
  CHECK_THROWS_AS(mph::extract_partials(s, bad), mph::Error);
}
