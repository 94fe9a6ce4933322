#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "multiphonic/harmonicity.hpp"
#include "multiphonic/tone_model.hpp"

namespace mph {

enum class Tuning { InTune, TooLow, TooHigh };

std::string_view tuning_name(Tuning t) noexcept;
Tuning parse_tuning(std::string_view text);  // throws ErrorCode::Format

struct ListenerReport {
  std::string sample_id;
  std::string listener_id;
  PitchName pitch;
  double certainty = 1.0;  // [0, 1]
  Tuning tuning = Tuning::InTune;
  std::size_t row = 0;     // source line, 0 when built in code
};

inline constexpr std::string_view kReportsHeader = "sample_id,listener_id,pitch,certainty,tuning";

/// Reads the reports CSV. Throws RowError with the offending line number.
std::vector<ListenerReport> load_reports(std::istream& in);

/// Mean over listeners of each listener's summed certainty for `sample_id`;
/// nullopt when nobody reported on the sample.
std::optional<double> weighted_pitch_count(std::span<const ListenerReport> reports, std::string_view sample_id);

struct ReportSummary {
  std::map<std::string, double> per_sample;    // weighted_pitch_count per sample
  std::map<std::string, double> per_listener;  // listener's mean over the samples they rated
  std::optional<double> global_mean;           // mean over (listener, sample) pairs
};

/// Corpus-wide view of the same metric, for cross-sample sanity checks.
ReportSummary summarize_reports(std::span<const ListenerReport> reports);

enum class AssociationTarget { F0, Harmonic, Partial, None };

std::string_view association_target_name(AssociationTarget t) noexcept;

struct PitchAssociation {
  PitchName pitch;
  AssociationTarget target = AssociationTarget::None;
  std::optional<int> harmonic;              // target = harmonic
  std::optional<std::size_t> partial_index; // matched partial, when the target has one
  int octave_shift = 0;                     // pitch = target * 2^shift
  std::optional<int> distance;              // absent iff target = none
  double error_cents = 0.0;                 // pitch relative to the shifted target
  std::string label;                        // "f0", "h2", "h12-1", "A#3+1", "none"
};

struct AssociationOptions {
  double match_tolerance_cents = 50.0;
  double low_register_hz = 45.0;
  double low_register_tolerance_cents = 200.0;
  int max_octave_shift = 2;
  double salience_range_db = 30.0;  // partials within this range of the loudest are salient
  Frequency reference = default_reference();
};

/// Minimal-distance association of a perceived pitch with the analysed tone.
///
/// d = |shift| for the fundamental, 1 + |shift| for an assigned harmonic
/// (n >= 2) or a salient unassigned partial. Ties go to the smaller shift, then
/// the louder target, then the smaller cent error.
PitchAssociation associate_perceived_pitch(const PitchName& pitch, const HarmonicFit& fit,
                                           std::span<const Partial> partials,
                                           const AssociationOptions& options = {});

enum class AssociationClass { D0 = 0, D1, D2, None };

std::string_view association_class_name(AssociationClass c) noexcept;
AssociationClass association_class(const PitchAssociation& a) noexcept;

struct PitchTally {
  std::string bin;                     // "F2", or "low" for the merged low register
  std::size_t count = 0;
  double certainty_sum = 0.0;
  double mean_cents = 0.0;             // mean reported offset within the bin
  std::array<std::size_t, 4> classes{};  // indexed by AssociationClass
  AssociationClass association = AssociationClass::None;  // most frequent, lower d on ties
  std::vector<std::string> labels;     // distinct, sorted
  int sort_key = 0;                    // semitone of the bin; low bin sorts first
};

struct ListenerCount {
  std::string listener_id;
  std::size_t reports = 0;
  double weighted_count = 0.0;
  bool has_duplicates = false;  // same bin reported more than once
};

struct PerceptionAggregate {
  std::string sample_id;
  std::size_t report_count = 0;
  std::vector<PitchTally> tallies;        // ascending pitch
  std::vector<ListenerCount> listeners;   // sorted by id
  std::optional<double> mean_weighted_count;
  bool duplicates_flagged = false;
  std::vector<PitchAssociation> associations;  // one per input report, input order
};

/// Reports must all carry the same sample id (InvalidSpec otherwise).
PerceptionAggregate aggregate_perception(std::span<const ListenerReport> reports, const HarmonicFit& fit,
                                         std::span<const Partial> partials,
                                         const AssociationOptions& options = {});

/// Pitch bin used for tallies: the quantized note, or "low" below the merge limit.
std::string perception_bin(const PitchName& pitch, const AssociationOptions& options = {});

nlohmann::json to_json(const PitchAssociation& a);
nlohmann::json to_json(const PerceptionAggregate& agg);

/// Bar-graph rows: bin,count,certainty_sum,association,labels
std::string perception_bar_csv(const PerceptionAggregate& agg);

}  // namespace mph
