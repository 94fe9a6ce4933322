#pragma once

// Brute-force reference computations used as test oracles. Nothing here calls
// into the library's algorithms; they only share the domain types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline double cents(double from_hz, double to_hz) { return 1200.0 * std::log2(to_hz / from_hz); }

inline double et_hz(int midi, double ref = 440.0) { return ref * std::exp2((midi - 69) / 12.0); }

// ISO 226:2003 50-phon contour at its 29 one-third-octave frequencies, frozen
// from an independent evaluation of the standard's formula.
inline constexpr std::array<double, 29> kIsoFreq = {
    20,   25,   31.5, 40,   50,   63,   80,   100,  125,  160,   200,   250,  315,   400,  500,
    630,  800,  1000, 1250, 1600, 2000, 2500, 3150, 4000, 5000, 6300, 8000, 10000, 12500};
inline constexpr std::array<double, 29> kIso50Phon = {
    104.72, 99.14, 93.69, 88.49, 83.96, 79.61, 75.36, 71.61, 68.17, 64.68, 61.72, 59.04, 56.55, 54.26, 52.59,
    51.10,  49.98, 50.01, 51.99, 52.88, 49.62, 46.91, 46.05, 47.15, 50.48, 56.11, 61.76, 63.78, 60.14};

// Table lookup, linear in log-frequency between anchors.
inline double iso50_spl(double hz) {
  for (std::size_t i = 0; i + 1 < kIsoFreq.size(); ++i) {
    if (hz >= kIsoFreq[i] && hz <= kIsoFreq[i + 1]) {
      const double t = std::log(hz / kIsoFreq[i]) / std::log(kIsoFreq[i + 1] / kIsoFreq[i]);
      return kIso50Phon[i] + t * (kIso50Phon[i + 1] - kIso50Phon[i]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Expected weighting gain (dB) relative to 1 kHz.
inline double iso50_gain_db(double hz) { return iso50_spl(1000.0) - iso50_spl(hz); }

// Direct O(N * L) normalised autocorrelation; returns rate / best integer lag.
inline double brute_acf_f0(const std::vector<double>& x, double rate, double fmin, double fmax) {
  const auto n = x.size();
  const auto lo = static_cast<std::size_t>(std::floor(rate / fmax));
  const auto hi = static_cast<std::size_t>(std::ceil(rate / fmin));
  double best = -2.0;
  std::size_t best_lag = lo;
  std::vector<double> r(hi + 2, 0.0);
  for (std::size_t lag = lo; lag <= hi + 1 && lag < n; ++lag) {
    double num = 0.0, e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      num += x[i] * x[i + lag];
      e1 += x[i] * x[i];
      e2 += x[i + lag] * x[i + lag];
    }
    r[lag] = num / std::sqrt(e1 * e2);
  }
  for (std::size_t lag = std::max<std::size_t>(lo, 1); lag <= hi; ++lag) {
    if (r[lag] > best) {
      best = r[lag];
      best_lag = lag;
    }
  }
  // Prefer the shortest lag whose correlation is essentially as high (period, not a multiple).
  for (std::size_t lag = std::max<std::size_t>(lo, 1); lag <= hi; ++lag) {
    if (r[lag] >= 0.95 * best && r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) return rate / static_cast<double>(lag);
  }
  return rate / static_cast<double>(best_lag);
}

// 0.01 Hz grid over [min/8, 1.05 min]; largest g with the most spacings inside tolerance.
inline double brute_gcd(const std::vector<double>& spacings, double tol_cents) {
  const double mn = *std::min_element(spacings.begin(), spacings.end());
  const auto steps = static_cast<long>(std::floor((1.05 * mn - mn / 8.0) / 0.01));
  struct Point {
    double g;
    int count;
    double rms;
  };
  std::vector<Point> grid;
  int best_count = -1;
  for (long i = 0; i <= steps; ++i) {
    const double g = mn / 8.0 + 0.01 * static_cast<double>(i);
    int count = 0;
    double sq = 0.0;
    for (double s : spacings) {
      const double n = std::max(1.0, std::round(s / g));
      const double d = cents(n * g, s);
      if (std::abs(d) <= tol_cents) {
        ++count;
        sq += d * d;
      }
    }
    const double rms = count > 0 ? std::sqrt(sq / count) : 0.0;
    grid.push_back({g, count, rms});
    best_count = std::max(best_count, count);
  }
  double best_rms = 1e300;
  for (const auto& p : grid) {
    if (p.count == best_count) best_rms = std::min(best_rms, p.rms);
  }
  double best_g = 0.0;
  for (const auto& p : grid) {
    if (p.count == best_count && p.rms <= best_rms + 1.0) best_g = p.g;
  }
  return best_g;
}

// Largest candidate f0 = p_i / n (n <= 32) that places every partial within tolerance.
struct SeriesFit {
  double f0 = 0.0;
  std::vector<int> harmonics;
};

inline std::optional<SeriesFit> brute_series(const std::vector<double>& partials, double tol_cents, double fmin,
                                             double fmax) {
  std::optional<SeriesFit> best;
  for (double p : partials) {
    for (int n = 1; n <= 32; ++n) {
      const double f0 = p / n;
      if (f0 < fmin || f0 > fmax) continue;
      SeriesFit fit{f0, {}};
      bool ok = true;
      for (double q : partials) {
        const int k = std::max(1, static_cast<int>(std::lround(q / f0)));
        if (std::abs(cents(k * f0, q)) > tol_cents) {
          ok = false;
          break;
        }
        fit.harmonics.push_back(k);
      }
      if (ok && (!best || f0 > best->f0)) best = fit;
    }
  }
  return best;
}

// Exhaustive distance-d search over every target and octave shift.
struct Target {
  double hz;
  int base;  // 0 for f0, 1 otherwise
};

inline std::optional<int> brute_min_d(double pitch_hz, const std::vector<Target>& targets, double tol_cents,
                                      int max_shift) {
  std::optional<int> best;
  for (const auto& t : targets) {
    for (int s = -max_shift; s <= max_shift; ++s) {
      if (std::abs(cents(t.hz * std::exp2(s), pitch_hz)) <= tol_cents) {
        const int d = t.base + std::abs(s);
        if (!best || d < *best) best = d;
      }
    }
  }
  return best;
}

// Sum of sines with given amplitudes (no normalisation), for building expectations.
inline std::vector<double> sines(const std::vector<std::pair<double, double>>& parts, double rate, std::size_t n) {
  std::vector<double> x(n, 0.0);
  for (const auto& [hz, amp] : parts) {
    for (std::size_t i = 0; i < n; ++i) x[i] += amp * std::sin(2.0 * std::numbers::pi * hz * i / rate);
  }
  return x;
}

}  // namespace oracle
