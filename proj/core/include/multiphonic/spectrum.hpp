#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace mph {

enum class SpectrumKind { Raw, Weighted, Smoothed };

std::string_view spectrum_kind_name(SpectrumKind kind) noexcept;

/// Discrete one-sided power spectrum.
///
/// Bin powers are normalised so that their sum equals the energy of the
/// windowed frame (Parseval). A weighted spectrum also carries the per-bin
/// gain that was applied, which lets peak interpolation locate frequencies on
/// the unweighted shape.
class Spectrum {
 public:
  Spectrum(std::vector<double> bin_frequencies, std::vector<double> bin_powers,
           double sample_rate, std::size_t window_length, SpectrumKind kind,
           std::vector<double> applied_gain = {});

  std::span<const double> frequencies() const noexcept { return freqs_; }
  std::span<const double> powers() const noexcept { return powers_; }
  std::span<const double> applied_gain() const noexcept { return gain_; }
  bool has_applied_gain() const noexcept { return !gain_.empty(); }

  double sample_rate() const noexcept { return rate_; }
  std::size_t window_length() const noexcept { return window_length_; }
  SpectrumKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return freqs_.size(); }
  bool empty() const noexcept { return freqs_.empty(); }

  /// Spacing between the first two bins (bins are uniform for FFT spectra).
  double bin_spacing() const noexcept;
  double total_power() const noexcept;

 private:
  std::vector<double> freqs_;
  std::vector<double> powers_;
  std::vector<double> gain_;
  double rate_;
  std::size_t window_length_;
  SpectrumKind kind_;
};

}  // namespace mph
