#pragma once

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "multiphonic/harmonicity.hpp"
#include "multiphonic/perception.hpp"
#include "multiphonic/tone_model.hpp"

namespace mph {

inline constexpr std::string_view kTraceHeader = "time_s,freq_hz,confidence";
inline constexpr double kDefaultVoicingThreshold = 0.5;

struct TraceFrame {
  double time_s = 0.0;
  double hz = 0.0;
  double confidence = 0.0;
  bool voiced = false;
};

struct TrackerTrace {
  std::string tracker_name;
  std::vector<TraceFrame> frames;
  double voicing_threshold = kDefaultVoicingThreshold;

  std::size_t voiced_count() const noexcept;
};

/// Voiced means confidence >= threshold and a positive frequency.
TrackerTrace make_trace(std::string tracker_name, std::vector<TraceFrame> frames,
                        double voicing_threshold = kDefaultVoicingThreshold);

/// Throws RowError on decreasing time, confidence outside [0, 1] or a
/// non-positive frequency on a voiced frame.
TrackerTrace load_tracker_trace(std::istream& in, std::string tracker_name,
                                double voicing_threshold = kDefaultVoicingThreshold);

struct TraceMode {
  int semitone = 0;         // MIDI index of the bin
  PitchName pitch;          // bin pitch with the mean cent offset of its frames
  double mass = 0.0;        // fraction of voiced weight
  std::size_t frames = 0;
  double mean_cents = 0.0;
};

struct TraceDistribution {
  std::vector<TraceMode> modes;  // descending mass, ascending pitch on ties
  std::size_t voiced_frames = 0;
  bool confidence_weighted = true;
};

/// Semitone histogram over voiced frames; nullopt when nothing is voiced.
std::optional<TraceDistribution> aggregate_trace_distribution(const TrackerTrace& trace,
                                                              bool confidence_weighted = true,
                                                              Frequency reference = default_reference());

struct OctaveJumpEvent {
  double time_s = 0.0;  // time of the later frame
  PitchName from;
  PitchName to;
  double interval_cents = 0.0;
};

inline constexpr double kDefaultJumpToleranceCents = 50.0;

/// Consecutive voiced frames whose interval lies within tolerance of a nonzero octave multiple.
std::vector<OctaveJumpEvent> detect_octave_jumps(const TrackerTrace& trace,
                                                 double jump_tolerance_cents = kDefaultJumpToleranceCents,
                                                 Frequency reference = default_reference());

struct ModeComparison {
  TraceMode mode;
  PitchAssociation association;
  bool perceived = false;
};

struct TrackerComparison {
  std::vector<ModeComparison> modes;
  std::optional<double> overlap;  // absent without perception data
};

/// Per-mode association and the share of tracker mass on pitches that at
/// least one listener reported (same note and octave; the merged low
/// register counts as one pitch).
TrackerComparison compare_distributions(const TraceDistribution& dist, const PerceptionAggregate* perception,
                                        const HarmonicFit& fit, std::span<const Partial> partials,
                                        const AssociationOptions& options = {});

nlohmann::json to_json(const TraceDistribution& d);
nlohmann::json to_json(const OctaveJumpEvent& e);
nlohmann::json to_json(const TrackerComparison& c);

}  // namespace mph
