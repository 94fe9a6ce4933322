#include <benchmark/benchmark.h>

#include <random>

#include "multiphonic/harmonicity.hpp"
#include "multiphonic/spectral.hpp"
#include "multiphonic/synthesis.hpp"
#include "multiphonic/temporal.hpp"

namespace {

constexpr double kRate = 48000.0;

std::vector<double> control_tone() {
  mph::RenderOptions r;
  r.duration_s = 0.5;
  return mph::generate_harmonic_tone(mph::Frequency{87.31}, 12, 3.0, r);
}

void BM_PowerSpectrum(benchmark::State& state) {
  const auto x = control_tone();
  mph::WindowConfig cfg;
  cfg.window_length = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mph::compute_power_spectrum(x, kRate, cfg));
}
BENCHMARK(BM_PowerSpectrum)->Arg(4096)->Arg(8192)->Arg(16384);

void BM_WeightAndPeaks(benchmark::State& state) {
  const auto raw = mph::compute_power_spectrum(control_tone(), kRate);
  for (auto _ : state) {
    const auto w = mph::apply_equal_loudness_weighting(raw);
    benchmark::DoNotOptimize(mph::extract_partials(w));
  }
}
BENCHMARK(BM_WeightAndPeaks);

void BM_HarmonicFit(benchmark::State& state) {
  std::vector<mph::Partial> ps;
  for (int n = 1; n <= state.range(0); ++n) ps.emplace_back(mph::Frequency{87.31 * n}, 1.0 / n);
  for (auto _ : state) benchmark::DoNotOptimize(mph::fit_least_deviating_series(ps));
}
BENCHMARK(BM_HarmonicFit)->Arg(4)->Arg(12)->Arg(32);

void BM_Autocorrelation(benchmark::State& state) {
  const auto x = control_tone();
  const std::span<const double> frame(x.data(), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mph::autocorrelation_f0(frame, kRate, {20.0, 2000.0}));
}
BENCHMARK(BM_Autocorrelation)->Arg(8192)->Arg(16384);

void BM_ApproximateGcd(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  std::vector<double> sp;
  for (int i = 0; i < state.range(0); ++i) sp.push_back(56.0 * (1 + i % 3) * (1.0 + jitter(gen)));
  for (auto _ : state) benchmark::DoNotOptimize(mph::approximate_gcd(sp));
}
BENCHMARK(BM_ApproximateGcd)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
