#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "multiphonic/harmonicity.hpp"
#include "multiphonic/perception.hpp"
#include "multiphonic/spectral.hpp"
#include "multiphonic/temporal.hpp"
#include "multiphonic/tracker.hpp"

namespace mph {

inline constexpr std::string_view kReportSchemaVersion = "1.0";
inline constexpr std::string_view kConfigSchemaVersion = "1.0";

std::string_view toolkit_version() noexcept;

struct AnalysisConfig {
  WindowConfig window{};
  PeakConfig peaks{};
  bool weighting = true;
  double phon = 50.0;
  double smoothing_bandwidth_hz = 128.0;
  double frame_offset_s = 0.0;
  SearchRange f0_search{};
  double assignment_tolerance_cents = kDefaultAssignmentToleranceCents;
  HarmonicityThresholds thresholds{};
  double gcd_tolerance_cents = 30.0;
  bool carrier_modulation = true;
  SearchRange modulation_search{20.0, 100.0};
  double carrier_max_hz = 5000.0;
  AssociationOptions association{};
  double voicing_threshold = kDefaultVoicingThreshold;
  double jump_tolerance_cents = kDefaultJumpToleranceCents;
  bool confidence_weighted = true;

  /// Throws ErrorCode::Configuration.
  void validate() const;
};

/// Overrides fields of `base` with the keys present in `j`; unknown keys and
/// wrongly typed values raise ErrorCode::Configuration.
AnalysisConfig config_from_json(const nlohmann::json& j, AnalysisConfig base = {});
nlohmann::json config_to_json(const AnalysisConfig& c);

struct SampleInfo {
  std::string id;
  double rate = 0.0;
  std::size_t sample_count = 0;
  unsigned channels = 1;
  std::string format;  // "pcm16", "pcm24", "float32", "memory"
};

struct AnalysisResult {
  SampleInfo sample;
  AnalysisConfig config;
  Spectrum raw;
  std::optional<Spectrum> weighted;
  Spectrum smoothed;
  std::vector<Partial> partials{};  // harmonic indices filled when a fit exists
  std::optional<F0Estimate> temporal_f0{};
  std::optional<SpacingProfile> spacing{};
  std::optional<GcdEstimate> gcd{};
  std::optional<HarmonicFit> fit{};
  std::optional<HarmonicityClass> classification{};
  std::optional<CarrierModulation> carrier_modulation{};
  std::vector<std::string> warnings{};

  /// Spectrum the partials were extracted from.
  const Spectrum& analysis_spectrum() const noexcept { return weighted ? *weighted : raw; }
};

/// Full single-frame pipeline. Throws InsufficientData when the signal is
/// shorter than the configured frame; degenerate fits become warnings.
AnalysisResult analyze_samples(std::span<const double> samples, SampleInfo info, const AnalysisConfig& config = {});

nlohmann::json spectrum_summary(const Spectrum& s);
nlohmann::json spectrum_to_json(const Spectrum& s);
nlohmann::json to_json(const F0Estimate& e);
nlohmann::json to_json(const HarmonicFit& fit);
nlohmann::json to_json(const HarmonicityClass& c);
nlohmann::json to_json(const CarrierModulation& cm);
nlohmann::json to_json(const AnalysisResult& r);

/// Rebuilds the fit and partial list stored in a report, for perception and
/// tracker comparison against a previously written analysis.
struct StoredAnalysis {
  std::string sample_id;
  std::vector<Partial> partials;
  std::optional<HarmonicFit> fit;
  AnalysisConfig config;
};
StoredAnalysis stored_analysis_from_json(const nlohmann::json& report);

/// Power in dB with a -300 dB floor for empty bins.
double power_db(double p) noexcept;

/// `freq_hz,power_db` rows.
std::string spectrum_csv(const Spectrum& s);
/// `freq_hz,power_db,harmonic,pitch` rows (dot plot sized by energy).
std::string partials_csv(const AnalysisResult& r);
/// `index,low_hz,high_hz,spacing_hz` rows.
std::string spacing_csv(const AnalysisResult& r);
/// `method,freq_hz,pitch,salience` rows.
std::string f0_markers_csv(const AnalysisResult& r);

}  // namespace mph
