#include "multiphonic/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "fft.hpp"
#include "multiphonic/error.hpp"

namespace mph {

namespace {

constexpr double kTinyPower = 1e-300;

double to_db(double p) { return 10.0 * std::log10(std::max(p, kTinyPower)); }

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Spectrum

std::string_view spectrum_kind_name(SpectrumKind kind) noexcept {
  switch (kind) {
    case SpectrumKind::Raw:      return "raw";
    case SpectrumKind::Weighted: return "weighted";
    case SpectrumKind::Smoothed: return "smoothed";
  }
  return "raw";
}

Spectrum::Spectrum(std::vector<double> bin_frequencies, std::vector<double> bin_powers,
                   double sample_rate, std::size_t window_length, SpectrumKind kind,
                   std::vector<double> applied_gain)
    : freqs_(std::move(bin_frequencies)),
      powers_(std::move(bin_powers)),
      gain_(std::move(applied_gain)),
      rate_(sample_rate),
      window_length_(window_length),
      kind_(kind) {
  if (freqs_.size() != powers_.size()) {
    throw Error(ErrorCode::Internal, "spectrum frequency and power arrays differ in length");
  }
  if (!gain_.empty() && gain_.size() != freqs_.size()) {
    throw Error(ErrorCode::Internal, "spectrum gain array has the wrong length");
  }
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (i > 0 && !(freqs_[i] > freqs_[i - 1])) {
      throw Error(ErrorCode::Internal, "spectrum bin frequencies must be strictly ascending");
    }
    if (!(powers_[i] >= 0.0) || !std::isfinite(powers_[i])) {
      throw Error(ErrorCode::Internal, "spectrum bin powers must be finite and non-negative");
    }
  }
}

double Spectrum::bin_spacing() const noexcept {
  return freqs_.size() >= 2 ? freqs_[1] - freqs_[0] : 0.0;
}

double Spectrum::total_power() const noexcept {
  return std::accumulate(powers_.begin(), powers_.end(), 0.0);
}

// ---------------------------------------------------------------------------
// Windowing

std::string_view window_shape_name(WindowShape shape) noexcept {
  switch (shape) {
    case WindowShape::Hann:           return "hann";
    case WindowShape::Hamming:        return "hamming";
    case WindowShape::Blackman:       return "blackman";
    case WindowShape::BlackmanHarris: return "blackman-harris";
  }
  return "hann";
}

WindowShape parse_window_shape(std::string_view name) {
  for (auto s : {WindowShape::Hann, WindowShape::Hamming, WindowShape::Blackman,
                 WindowShape::BlackmanHarris}) {
    if (window_shape_name(s) == name) return s;
  }
  throw Error(ErrorCode::Configuration, "unknown window shape '" + std::string(name) + "'");
}

void WindowConfig::validate() const {
  if (window_length < 1024 || !is_power_of_two(window_length)) {
    throw Error(ErrorCode::Configuration, "window_length must be a power of two >= 1024");
  }
  if (zero_pad_factor < 1) throw Error(ErrorCode::Configuration, "zero_pad_factor must be >= 1");
  if (hop < 1) throw Error(ErrorCode::Configuration, "hop must be >= 1");
  if (frames < 1) throw Error(ErrorCode::Configuration, "frames must be >= 1");
}

std::vector<double> make_window(WindowShape shape, std::size_t n) {
  std::array<double, 4> a{};
  switch (shape) {
    case WindowShape::Hann:           a = {0.5, 0.5, 0.0, 0.0}; break;
    case WindowShape::Hamming:        a = {0.54, 0.46, 0.0, 0.0}; break;
    case WindowShape::Blackman:       a = {0.42, 0.5, 0.08, 0.0}; break;
    case WindowShape::BlackmanHarris: a = {0.35875, 0.48829, 0.14128, 0.01168}; break;
  }
  std::vector<double> w(n);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = step * static_cast<double>(i);
    w[i] = a[0] - a[1] * std::cos(x) + a[2] * std::cos(2.0 * x) - a[3] * std::cos(3.0 * x);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Operations

Spectrum compute_power_spectrum(std::span<const double> samples, double rate,
                                const WindowConfig& cfg) {
  cfg.validate();
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorCode::Configuration, "sample rate must be positive");
  }
  if (samples.size() < cfg.required_samples()) {
    throw Error(ErrorCode::InsufficientData,
                "frame has " + std::to_string(samples.size()) + " samples, analysis needs " +
                    std::to_string(cfg.required_samples()));
  }

  const std::size_t n_fft = cfg.fft_length();
  const std::size_t bins = n_fft / 2 + 1;
  const auto window = make_window(cfg.shape, cfg.window_length);

  detail::RealFft fft(n_fft);
  std::vector<double> frame(cfg.window_length);
  std::vector<std::complex<double>> spec(bins);
  std::vector<double> power(bins, 0.0);

  for (std::size_t f = 0; f < cfg.frames; ++f) {
    const auto* src = samples.data() + f * cfg.hop;
    for (std::size_t i = 0; i < cfg.window_length; ++i) frame[i] = src[i] * window[i];
    fft.forward(frame, spec);
    for (std::size_t k = 0; k < bins; ++k) {
      const double scale = (k == 0 || k == bins - 1) ? 1.0 : 2.0;
      power[k] += scale * std::norm(spec[k]) / static_cast<double>(n_fft);
    }
  }
  if (cfg.frames > 1) {
    for (auto& p : power) p /= static_cast<double>(cfg.frames);
  }

  std::vector<double> freqs(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    freqs[k] = static_cast<double>(k) * rate / static_cast<double>(n_fft);
  }
  return Spectrum(std::move(freqs), std::move(power), rate, cfg.window_length, SpectrumKind::Raw);
}

Spectrum apply_equal_loudness_weighting(const Spectrum& s, const LoudnessContour& contour) {
  if (s.kind() != SpectrumKind::Raw) {
    throw Error(ErrorCode::Configuration, "equal-loudness weighting expects a raw spectrum");
  }
  const auto freqs = s.frequencies();
  const auto powers = s.powers();
  const double floor_gain = std::pow(10.0, kWeightingFloorDb / 10.0);

  std::vector<double> gain(freqs.size());
  std::vector<double> weighted(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double f = freqs[i];
    const bool inside = f >= contour.min_frequency() && f <= contour.max_frequency();
    gain[i] = inside ? std::pow(10.0, contour.gain_db(f) / 10.0) : floor_gain;
    weighted[i] = powers[i] * gain[i];
  }
  return Spectrum({freqs.begin(), freqs.end()}, std::move(weighted), s.sample_rate(),
                  s.window_length(), SpectrumKind::Weighted, std::move(gain));
}

Spectrum smooth_spectrum(const Spectrum& s, double bandwidth_hz) {
  const double df = s.bin_spacing();
  if (s.size() < 2 || !(bandwidth_hz > df)) {
    throw Error(ErrorCode::Configuration,
                "smoothing bandwidth must exceed the bin spacing (" + std::to_string(df) + " Hz)");
  }
  const double sigma_bins = bandwidth_hz / 2.355 / df;
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma_bins));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  for (std::ptrdiff_t j = -half; j <= half; ++j) {
    const double x = static_cast<double>(j) / sigma_bins;
    kernel[static_cast<std::size_t>(j + half)] = std::exp(-0.5 * x * x);
  }

  const auto p = s.powers();
  const auto n = static_cast<std::ptrdiff_t>(p.size());
  std::vector<double> out(p.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    double acc = 0.0;
    double norm = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double w = kernel[static_cast<std::size_t>(j - i + half)];
      acc += w * p[static_cast<std::size_t>(j)];
      norm += w;
    }
    out[static_cast<std::size_t>(i)] = acc / norm;
  }
  const auto f = s.frequencies();
  return Spectrum({f.begin(), f.end()}, std::move(out), s.sample_rate(), s.window_length(),
                  SpectrumKind::Smoothed);
}

void PeakConfig::validate() const {
  if (!(relative_floor_db > 0.0)) throw Error(ErrorCode::Configuration, "relative_floor_db must be > 0");
  if (!(min_prominence_db >= 0.0)) throw Error(ErrorCode::Configuration, "min_prominence_db must be >= 0");
  if (max_partials < 1) throw Error(ErrorCode::Configuration, "max_partials must be >= 1");
}

std::vector<Partial> extract_partials(const Spectrum& s, const PeakConfig& cfg) {
  cfg.validate();
  const auto p = s.powers();
  const auto freqs = s.frequencies();
  const std::size_t n = p.size();
  if (n < 3) return {};

  const double max_power = *std::max_element(p.begin(), p.end());
  if (!(max_power > 0.0)) return {};
  const double floor_power = max_power * std::pow(10.0, -cfg.relative_floor_db / 10.0);

  std::vector<double> db(n);
  std::transform(p.begin(), p.end(), db.begin(), to_db);

  // Log-power of the unweighted shape, used to place the parabola vertex.
  std::vector<double> shape_db = db;
  if (s.has_applied_gain()) {
    const auto g = s.applied_gain();
    for (std::size_t i = 0; i < n; ++i) shape_db[i] = to_db(p[i] / g[i]);
  }

  struct Candidate {
    double hz;
    double power;
    double rank_power;
  };
  std::vector<Candidate> found;

  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (!(p[k] > p[k - 1] && p[k] >= p[k + 1]) || p[k] < floor_power) continue;

    double left_min = p[k];
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (p[i] > p[k]) break;
      left_min = std::min(left_min, p[i]);
    }
    double right_min = p[k];
    for (std::size_t j = k + 1; j < n; ++j) {
      if (p[j] > p[k]) break;
      right_min = std::min(right_min, p[j]);
    }
    const double prominence = db[k] - to_db(std::max(left_min, right_min));
    if (prominence < cfg.min_prominence_db) continue;

    // The contour slope can move the weighted maximum off the true peak bin.
    std::size_t v = k;
    if (s.has_applied_gain()) {
      while (v + 2 < n && shape_db[v + 1] > shape_db[v]) ++v;
      while (v > 1 && shape_db[v - 1] > shape_db[v]) --v;
    }
    const double a = shape_db[v - 1];
    const double b = shape_db[v];
    const double c = shape_db[v + 1];
    const double denom = a - 2.0 * b + c;
    double delta = 0.0;
    if (denom < 0.0) delta = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    const double vertex_db = b - 0.25 * (a - c) * delta;
    const double df = delta >= 0.0 ? freqs[v + 1] - freqs[v] : freqs[v] - freqs[v - 1];
    const double hz = freqs[v] + delta * df;

    double power = std::pow(10.0, vertex_db / 10.0);
    if (s.has_applied_gain()) {
      const auto g = s.applied_gain();
      const std::size_t nb = delta >= 0.0 ? v + 1 : v - 1;
      const double t = std::abs(delta);
      power *= (1.0 - t) * g[v] + t * g[nb];
    }
    if (power < floor_power || !(hz > 0.0)) continue;
    found.push_back({hz, power, p[k]});
  }

  if (found.size() > cfg.max_partials) {
    std::stable_sort(found.begin(), found.end(),
                     [](const Candidate& x, const Candidate& y) { return x.rank_power > y.rank_power; });
    found.resize(cfg.max_partials);
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Candidate& x, const Candidate& y) { return x.hz < y.hz; });

  std::vector<Partial> out;
  out.reserve(found.size());
  for (const auto& c : found) {
    if (!out.empty() && !(c.hz > out.back().hz())) {
      if (c.power > out.back().power()) out.back() = Partial(Frequency{c.hz}, c.power);
      continue;
    }
    out.emplace_back(Frequency{c.hz}, c.power);
  }
  return out;
}

}  // namespace mph
