#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "multiphonic/spectral.hpp"
#include "multiphonic/temporal.hpp"
#include "multiphonic/tone_model.hpp"

namespace mph {

inline constexpr double kDefaultAssignmentToleranceCents = 35.0;

struct HarmonicAssignment {
  std::size_t partial_index = 0;
  int harmonic = 1;
  double deviation_cents = 0.0;
};

struct HarmonicFit {
  Frequency f0{1.0};
  std::vector<HarmonicAssignment> assignments;  // ascending partial index
  std::vector<std::size_t> unassigned;
  double rms_deviation_cents = 0.0;  // unweighted, over assigned partials
  double tolerance_cents = kDefaultAssignmentToleranceCents;
  std::size_t partial_count = 0;

  double assigned_fraction() const noexcept;
  /// Harmonic number assigned to a partial, if any.
  std::optional<int> harmonic_of(std::size_t partial_index) const noexcept;
  /// Partial index carrying harmonic n, if any.
  std::optional<std::size_t> partial_of(int harmonic) const noexcept;
};

struct FitOptions {
  SearchRange search{};
  double tolerance_cents = kDefaultAssignmentToleranceCents;
};

/// Assigns round(f / f0) to each partial lying within `tolerance_cents` of
/// that harmonic; when two partials claim the same harmonic the closer one
/// keeps it. Partials must be ascending in frequency.
HarmonicFit assign_harmonic_numbers(std::span<const Partial> partials, Frequency f0,
                                    double tolerance_cents = kDefaultAssignmentToleranceCents);

/// Least-deviating harmonic series.
///
/// Objective: power-weighted mean of squared cent deviations from the nearest
/// harmonic, each clipped at the assignment tolerance so that stray partials
/// cost a bounded amount. The objective is scanned on a 1-cent grid; among
/// local minima within max(4 ct^2, 25 %) of the global minimum the highest f0
/// is kept (subharmonics of a good fit score equally well). The pick is then
/// refined by weighted least squares in log-frequency with the harmonic numbers
/// held fixed.
///
/// Throws InsufficientData for < 2 partials and DegenerateFit if nothing is
/// assigned at the optimum.
HarmonicFit fit_least_deviating_series(std::span<const Partial> partials, const FitOptions& options = {});

/// Repeated fit on the partials left unassigned by the previous series. The
/// first entry is the ordinary least-deviating fit; indices refer to `partials`.
std::vector<HarmonicFit> fit_series_on_residuals(std::span<const Partial> partials,
                                                 const FitOptions& options = {},
                                                 std::size_t max_series = 5);

/// Copy of `partials` with harmonic_index filled in from the fit.
std::vector<Partial> annotate_partials(std::span<const Partial> partials, const HarmonicFit& fit);

enum class Harmonicity { QuasiHarmonic, Inharmonic };

std::string_view harmonicity_name(Harmonicity h) noexcept;

struct HarmonicityEvidence {
  double rms_deviation_cents = 0.0;
  double assigned_fraction = 0.0;
  double spacing_ratio = 0.0;           // spacing center / f0
  double folded_spacing_cents = 0.0;    // cents(f0 -> center), octave-folded to [-600, 600)
  double harmonic_coverage = 0.0;       // assigned partials / harmonic slots between lowest and highest assigned
};

struct HarmonicityThresholds {
  double min_assigned_fraction = 0.8;
  double max_rms_cents = 25.0;
  double max_spacing_offset_cents = 50.0;
  double min_harmonic_coverage = 0.3;
};

struct HarmonicityClass {
  Harmonicity label = Harmonicity::QuasiHarmonic;
  HarmonicityEvidence evidence;
};

HarmonicityEvidence harmonicity_evidence(const HarmonicFit& fit, const SpacingProfile& profile);

/// The decision rule on its own: inharmonic if any threshold is violated.
Harmonicity decide_harmonicity(const HarmonicityEvidence& e, const HarmonicityThresholds& t = {});

HarmonicityClass classify_harmonicity(const HarmonicFit& fit, const SpacingProfile& profile,
                                      const HarmonicityThresholds& t = {});

struct DecomposeOptions {
  WindowConfig window{};
  PeakConfig peaks{};
  double smoothing_bandwidth_hz = 128.0;
  SearchRange modulation_search{20.0, 100.0};
  double carrier_max_hz = 5000.0;
  double phon = 50.0;
};

struct CarrierModulation {
  std::optional<F0Estimate> carrier;     // envelope peak of the smoothed spectrum
  std::optional<F0Estimate> modulation;  // low-range autocorrelation of the raw frame
  std::optional<double> sideband_spacing_hz;
  std::optional<double> weighted_envelope_peak_hz;  // same envelope after loudness weighting
};

/// Splits an FM-like tone into a carrier (spectral-envelope peak) and a
/// modulation (waveform periodicity). The carrier is the envelope peak of the
/// unweighted smoothed spectrum; the weighted envelope peak is reported
/// alongside and sits higher wherever the contour slopes.
///
/// A frame with fewer than three raw partials has no sidebands and yields no
/// modulation estimate.
CarrierModulation decompose_carrier_modulation(std::span<const double> samples, double rate,
                                               const DecomposeOptions& options = {});

}  // namespace mph
