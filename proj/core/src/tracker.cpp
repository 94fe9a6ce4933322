#include "multiphonic/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "multiphonic/error.hpp"

namespace mph {

std::size_t TrackerTrace::voiced_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.voiced; }));
}

TrackerTrace make_trace(std::string tracker_name, std::vector<TraceFrame> frames, double voicing_threshold) {
  if (!(voicing_threshold >= 0.0 && voicing_threshold <= 1.0)) {
    throw Error(ErrorCode::Configuration, "voicing threshold must lie in [0, 1]");
  }
  for (auto& f : frames) f.voiced = f.confidence >= voicing_threshold && f.hz > 0.0;
  return TrackerTrace{std::move(tracker_name), std::move(frames), voicing_threshold};
}

TrackerTrace load_tracker_trace(std::istream& in, std::string tracker_name, double voicing_threshold) {
  detail::CsvReader reader(in);
  reader.expect_header(kTraceHeader);
  std::vector<TraceFrame> frames;
  while (auto fields = reader.next()) {
    const auto row = reader.row();
    if (fields->size() != 3) throw RowError(row, "expected 3 fields, got " + std::to_string(fields->size()));
    TraceFrame f;
    f.time_s = detail::parse_double((*fields)[0], row, "time_s");
    f.hz = detail::parse_double((*fields)[1], row, "freq_hz");
    f.confidence = detail::parse_double((*fields)[2], row, "confidence");
    if (!frames.empty() && f.time_s < frames.back().time_s) {
      throw RowError(row, "time " + (*fields)[0] + " decreases");
    }
    if (f.confidence < 0.0 || f.confidence > 1.0) throw RowError(row, "confidence outside [0, 1]");
    if (f.hz < 0.0) throw RowError(row, "negative frequency");
    if (f.confidence >= voicing_threshold && f.confidence > 0.0 && f.hz <= 0.0) {
      throw RowError(row, "voiced frame without a positive frequency");
    }
    frames.push_back(f);
  }
  return make_trace(std::move(tracker_name), std::move(frames), voicing_threshold);
}

std::optional<TraceDistribution> aggregate_trace_distribution(const TrackerTrace& trace, bool confidence_weighted,
                                                              Frequency reference) {
  struct Bin {
    double weight = 0.0;
    double cents_weight = 0.0;
    std::size_t frames = 0;
  };
  std::map<int, Bin> bins;
  double total = 0.0;
  std::size_t voiced = 0;
  for (const auto& f : trace.frames) {
    if (!f.voiced) continue;
    const double w = confidence_weighted ? f.confidence : 1.0;
    const auto p = freq_to_pitch(Frequency{f.hz}, reference);
    auto& b = bins[p.semitone()];
    b.weight += w;
    b.cents_weight += w * p.cents();
    ++b.frames;
    total += w;
    ++voiced;
  }
  if (voiced == 0) return std::nullopt;

  TraceDistribution d;
  d.voiced_frames = voiced;
  d.confidence_weighted = confidence_weighted;
  for (const auto& [semi, b] : bins) {
    TraceMode m;
    m.semitone = semi;
    m.frames = b.frames;
    // All-zero confidences fall back to frame counts.
    m.mass = total > 0.0 ? b.weight / total : static_cast<double>(b.frames) / static_cast<double>(voiced);
    m.mean_cents = b.weight > 0.0 ? b.cents_weight / b.weight : 0.0;
    m.pitch = PitchName::from_semitone(semi, m.mean_cents);
    d.modes.push_back(m);
  }
  std::stable_sort(d.modes.begin(), d.modes.end(), [](const auto& a, const auto& b) { return a.mass > b.mass; });
  return d;
}

std::vector<OctaveJumpEvent> detect_octave_jumps(const TrackerTrace& trace, double jump_tolerance_cents,
                                                 Frequency reference) {
  if (!(jump_tolerance_cents >= 0.0 && jump_tolerance_cents < 600.0)) {
    throw Error(ErrorCode::Configuration, "jump tolerance must lie in [0, 600) cents");
  }
  std::vector<OctaveJumpEvent> events;
  const TraceFrame* prev = nullptr;
  for (const auto& f : trace.frames) {
    if (!f.voiced) continue;
    if (prev) {
      const double interval = 1200.0 * std::log2(f.hz / prev->hz);
      const double k = std::round(interval / 1200.0);
      if (k != 0.0 && std::abs(interval - 1200.0 * k) <= jump_tolerance_cents) {
        events.push_back({f.time_s, freq_to_pitch(Frequency{prev->hz}, reference),
                          freq_to_pitch(Frequency{f.hz}, reference), interval});
      }
    }
    prev = &f;
  }
  return events;
}

TrackerComparison compare_distributions(const TraceDistribution& dist, const PerceptionAggregate* perception,
                                        const HarmonicFit& fit, std::span<const Partial> partials,
                                        const AssociationOptions& options) {
  std::set<std::string> perceived;
  if (perception) {
    for (const auto& a : perception->associations) perceived.insert(perception_bin(a.pitch, options));
  }

  TrackerComparison out;
  double overlap = 0.0;
  for (const auto& m : dist.modes) {
    ModeComparison c;
    c.mode = m;
    c.association = associate_perceived_pitch(m.pitch, fit, partials, options);
    c.perceived = perceived.contains(perception_bin(m.pitch, options));
    if (c.perceived) overlap += m.mass;
    out.modes.push_back(std::move(c));
  }
  if (perception) out.overlap = std::clamp(overlap, 0.0, 1.0);
  return out;
}

nlohmann::json to_json(const TraceDistribution& d) {
  auto modes = nlohmann::json::array();
  for (const auto& m : d.modes) {
    modes.push_back({{"pitch", m.pitch.to_string()},
                     {"note", m.pitch.note_label()},
                     {"mass", m.mass},
                     {"frames", m.frames},
                     {"mean_cents", m.mean_cents}});
  }
  return {{"modes", modes}, {"voiced_frames", d.voiced_frames}, {"confidence_weighted", d.confidence_weighted}};
}

nlohmann::json to_json(const OctaveJumpEvent& e) {
  return {{"time_s", e.time_s},
          {"from", e.from.to_string()},
          {"to", e.to.to_string()},
          {"interval_cents", e.interval_cents}};
}

nlohmann::json to_json(const TrackerComparison& c) {
  auto modes = nlohmann::json::array();
  for (const auto& m : c.modes) {
    modes.push_back({{"pitch", m.mode.pitch.to_string()},
                     {"mass", m.mode.mass},
                     {"label", m.association.label},
                     {"d", m.association.distance ? nlohmann::json(*m.association.distance) : nlohmann::json(nullptr)},
                     {"perceived", m.perceived}});
  }
  return {{"modes", modes}, {"overlap", c.overlap ? nlohmann::json(*c.overlap) : nlohmann::json(nullptr)}};
}

}  // namespace mph
