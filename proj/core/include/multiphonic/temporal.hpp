#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "multiphonic/tone_model.hpp"

namespace mph {

enum class F0Method { Autocorrelation, SpacingGcd, SmoothedAutocorrelation, SpectralEnvelope, SpectralFit };

std::string_view f0_method_name(F0Method m) noexcept;

struct F0Estimate {
  Frequency frequency;
  double salience = 0.0;  // [0, 1]
  F0Method method = F0Method::Autocorrelation;
};

struct SearchRange {
  double min_hz = 20.0;
  double max_hz = 2000.0;

  void validate() const;
};

/// Highest energy-normalised autocorrelation peak beyond zero lag, restricted to
/// lags in [rate/max_hz, rate/min_hz]. The normalisation divides each lag by the
/// geometric mean of the energies of the two overlapping segments, so a
/// perfectly periodic frame peaks at 1 regardless of lag. Among near-equal peaks
/// (within kPeakTieRatio of the best) the shortest lag wins, which keeps exact
/// multiples of the period from shadowing it.
///
/// Returns nullopt when no positive peak lies in range. Throws
/// ErrorCode::InsufficientData when the frame is shorter than 2 * rate / min_hz.
std::optional<F0Estimate> autocorrelation_f0(std::span<const double> samples, double rate,
                                             const SearchRange& search = {});

inline constexpr double kPeakTieRatio = 0.95;

/// Energy-normalised autocorrelation for lags 0..max_lag (inclusive).
std::vector<double> normalized_autocorrelation(std::span<const double> samples, std::size_t max_lag);

struct SpacingProfile {
  std::vector<double> spacings;  // Hz, adjacent-partial differences
  double center = 0.0;           // median
  double dispersion = 0.0;       // median absolute deviation
};

SpacingProfile partial_spacings(std::span<const Partial> partials);

struct GcdEstimate {
  Frequency divisor;
  double fit_fraction = 0.0;  // share of spacings within tolerance of a multiple
  double rms_cents = 0.0;     // over the fitting spacings
  std::vector<int> multiples;

  bool fits_all() const noexcept { return fit_fraction >= 1.0; }
};

/// Largest divisor g such that the most spacings lie within `tolerance_cents`
/// of an integer multiple of g, searched on a 0.01 Hz grid over
/// [min/8, 1.05 * min] and refined by least squares in log-frequency with the
/// multiples held fixed.
GcdEstimate approximate_gcd(std::span<const double> spacings, double tolerance_cents = 30.0);

double median(std::vector<double> values);

}  // namespace mph
