#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "multiphonic/spectrum.hpp"
#include "multiphonic/tone_model.hpp"

namespace mph {

enum class WindowShape { Hann, Hamming, Blackman, BlackmanHarris };

std::string_view window_shape_name(WindowShape shape) noexcept;
WindowShape parse_window_shape(std::string_view name);

struct WindowConfig {
  std::size_t window_length = 8192;  // power of two, >= 1024
  std::size_t hop = 2048;
  std::size_t zero_pad_factor = 4;
  WindowShape shape = WindowShape::BlackmanHarris;
  std::size_t frames = 1;  // > 1 averages power over consecutive hops

  /// Throws ErrorCode::Configuration on violated invariants.
  void validate() const;
  std::size_t fft_length() const noexcept { return window_length * zero_pad_factor; }
  /// Samples consumed by compute_power_spectrum.
  std::size_t required_samples() const noexcept { return window_length + (frames - 1) * hop; }
};

/// Periodic tapered-cosine window of length n.
std::vector<double> make_window(WindowShape shape, std::size_t n);

/// Equal-loudness contour sampled at anchor frequencies, interpolated with a
/// monotone cubic (Fritsch-Carlson) over log-frequency.
class LoudnessContour {
 public:
  LoudnessContour(double phon_level, std::vector<double> anchor_frequencies,
                  std::vector<double> contour_spl);

  /// Contour computed from the ISO 226 tabulated parameters (29 one-third
  /// octave anchors, 20 Hz .. 12.5 kHz).
  static LoudnessContour iso226(double phon = 50.0);

  double phon_level() const noexcept { return phon_; }
  std::span<const double> anchor_frequencies() const noexcept { return freqs_; }
  std::span<const double> contour_spl() const noexcept { return spl_; }
  double min_frequency() const noexcept { return freqs_.front(); }
  double max_frequency() const noexcept { return freqs_.back(); }

  /// SPL on the contour at `hz`; throws ErrorCode::Configuration outside the anchors.
  double spl_at(double hz) const;

  /// Relative power gain in dB, 0 dB at 1 kHz.
  double gain_db(double hz) const;

 private:
  double phon_;
  std::vector<double> freqs_;
  std::vector<double> spl_;
  std::vector<double> log_freqs_;
  std::vector<double> slopes_;
  double reference_spl_;
};

/// SPL (dB) of the ISO 226 equal-loudness contour at one of its tabulated
/// anchor frequencies, straight from the standard's formula.
double iso226_spl_at_anchor(std::size_t anchor_index, double phon);
std::span<const double> iso226_anchor_frequencies() noexcept;

struct PeakConfig {
  double relative_floor_db = 60.0;
  double min_prominence_db = 6.0;
  std::size_t max_partials = 64;

  void validate() const;
};

inline constexpr double kWeightingFloorDb = -120.0;

Spectrum compute_power_spectrum(std::span<const double> samples, double rate,
                                const WindowConfig& cfg = {});

Spectrum apply_equal_loudness_weighting(const Spectrum& s,
                                        const LoudnessContour& contour = LoudnessContour::iso226());

Spectrum smooth_spectrum(const Spectrum& s, double bandwidth_hz);

/// Local maxima above the relative floor with enough prominence, refined by
/// parabolic interpolation over log-power, ascending in frequency.
std::vector<Partial> extract_partials(const Spectrum& s, const PeakConfig& cfg = {});

}  // namespace mph
