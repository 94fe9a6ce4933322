#include "multiphonic/perception.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "multiphonic/error.hpp"

namespace mph {

std::string_view tuning_name(Tuning t) noexcept {
  switch (t) {
    case Tuning::InTune:  return "in-tune";
    case Tuning::TooLow:  return "too-low";
    case Tuning::TooHigh: return "too-high";
  }
  return "in-tune";
}

Tuning parse_tuning(std::string_view text) {
  for (auto t : {Tuning::InTune, Tuning::TooLow, Tuning::TooHigh}) {
    if (tuning_name(t) == text) return t;
  }
  throw Error(ErrorCode::Format, "unknown tuning flag '" + std::string(text) + "'");
}

std::vector<ListenerReport> load_reports(std::istream& in) {
  detail::CsvReader reader(in);
  reader.expect_header(kReportsHeader);
  std::vector<ListenerReport> out;
  while (auto fields = reader.next()) {
    const auto row = reader.row();
    if (fields->size() != 5) {
      throw RowError(row, "expected 5 fields, got " + std::to_string(fields->size()));
    }
    ListenerReport r;
    r.row = row;
    r.sample_id = (*fields)[0];
    r.listener_id = (*fields)[1];
    if (r.sample_id.empty()) throw RowError(row, "empty sample_id");
    if (r.listener_id.empty()) throw RowError(row, "empty listener_id");
    try {
      r.pitch = PitchName::parse((*fields)[2]);
    } catch (const Error& e) {
      throw RowError(row, e.what());
    }
    r.certainty = detail::parse_double((*fields)[3], row, "certainty");
    if (r.certainty < 0.0 || r.certainty > 1.0) {
      throw RowError(row, "certainty " + (*fields)[3] + " outside [0, 1]");
    }
    try {
      r.tuning = parse_tuning((*fields)[4]);
    } catch (const Error& e) {
      throw RowError(row, e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::optional<double> weighted_pitch_count(std::span<const ListenerReport> reports, std::string_view sample_id) {
  std::map<std::string, double> per_listener;
  for (const auto& r : reports) {
    if (r.sample_id == sample_id) per_listener[r.listener_id] += r.certainty;
  }
  if (per_listener.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [id, s] : per_listener) sum += s;
  return sum / static_cast<double>(per_listener.size());
}

ReportSummary summarize_reports(std::span<const ListenerReport> reports) {
  std::map<std::pair<std::string, std::string>, double> pairs;  // (sample, listener) -> certainty sum
  for (const auto& r : reports) pairs[{r.sample_id, r.listener_id}] += r.certainty;

  ReportSummary out;
  std::map<std::string, std::pair<double, std::size_t>> by_sample;
  std::map<std::string, std::pair<double, std::size_t>> by_listener;
  double total = 0.0;
  for (const auto& [key, sum] : pairs) {
    auto& s = by_sample[key.first];
    s.first += sum;
    ++s.second;
    auto& l = by_listener[key.second];
    l.first += sum;
    ++l.second;
    total += sum;
  }
  for (const auto& [id, v] : by_sample) out.per_sample[id] = v.first / static_cast<double>(v.second);
  for (const auto& [id, v] : by_listener) out.per_listener[id] = v.first / static_cast<double>(v.second);
  if (!pairs.empty()) out.global_mean = total / static_cast<double>(pairs.size());
  return out;
}

std::string_view association_target_name(AssociationTarget t) noexcept {
  switch (t) {
    case AssociationTarget::F0:       return "f0";
    case AssociationTarget::Harmonic: return "harmonic";
    case AssociationTarget::Partial:  return "partial";
    case AssociationTarget::None:     return "none";
  }
  return "none";
}

namespace {

struct Target {
  AssociationTarget kind;
  double hz;
  double power;
  int base_distance;
  std::optional<int> harmonic;
  std::optional<std::size_t> partial_index;
  std::string name;
};

std::vector<Target> collect_targets(const HarmonicFit& fit, std::span<const Partial> partials,
                                    const AssociationOptions& options) {
  std::vector<Target> targets;
  double f0_power = 0.0;
  std::optional<std::size_t> f0_partial;
  if (auto i = fit.partial_of(1); i && *i < partials.size()) {
    f0_power = partials[*i].power();
    f0_partial = *i;
  }
  targets.push_back({AssociationTarget::F0, fit.f0.hz(), f0_power, 0, 1, f0_partial, "f0"});

  double loudest = 0.0;
  for (const auto& p : partials) loudest = std::max(loudest, p.power());
  const double salient_floor = loudest * std::pow(10.0, -options.salience_range_db / 10.0);

  for (const auto& a : fit.assignments) {
    if (a.harmonic < 2 || a.partial_index >= partials.size()) continue;
    const auto& p = partials[a.partial_index];
    targets.push_back({AssociationTarget::Harmonic, p.hz(), p.power(), 1, a.harmonic, a.partial_index,
                       "h" + std::to_string(a.harmonic)});
  }
  for (std::size_t i = 0; i < partials.size(); ++i) {
    if (fit.harmonic_of(i) || partials[i].power() < salient_floor || !(partials[i].power() > 0.0)) continue;
    targets.push_back({AssociationTarget::Partial, partials[i].hz(), partials[i].power(), 1, std::nullopt, i,
                       freq_to_pitch(partials[i].frequency(), options.reference).note_label()});
  }
  return targets;
}

std::string shift_suffix(int shift) {
  if (shift == 0) return {};
  return (shift > 0 ? "+" : "") + std::to_string(shift);
}

}  // namespace

PitchAssociation associate_perceived_pitch(const PitchName& pitch, const HarmonicFit& fit,
                                           std::span<const Partial> partials, const AssociationOptions& options) {
  const double pitch_hz = pitch_to_freq(pitch, options.reference).hz();
  const double tol =
      pitch_hz < options.low_register_hz ? options.low_register_tolerance_cents : options.match_tolerance_cents;

  PitchAssociation best;
  best.pitch = pitch;
  best.label = "none";
  const Target* best_target = nullptr;

  auto better = [&](int d, int shift, const Target& t, double err) {
    if (!best_target) return true;
    if (d != *best.distance) return d < *best.distance;
    if (std::abs(shift) != std::abs(best.octave_shift)) return std::abs(shift) < std::abs(best.octave_shift);
    if (t.power != best_target->power) return t.power > best_target->power;
    return std::abs(err) < std::abs(best.error_cents);
  };

  const auto targets = collect_targets(fit, partials, options);
  for (const auto& t : targets) {
    for (int shift = -options.max_octave_shift; shift <= options.max_octave_shift; ++shift) {
      const double err = 1200.0 * std::log2(pitch_hz / (t.hz * std::exp2(shift)));
      if (std::abs(err) > tol) continue;
      const int d = t.base_distance + std::abs(shift);
      if (!better(d, shift, t, err)) continue;
      best_target = &t;
      best.target = t.kind;
      best.harmonic = t.kind == AssociationTarget::Harmonic ? t.harmonic : std::nullopt;
      best.partial_index = t.partial_index;
      best.octave_shift = shift;
      best.distance = d;
      best.error_cents = err;
      best.label = t.name + shift_suffix(shift);
    }
  }
  return best;
}

std::string_view association_class_name(AssociationClass c) noexcept {
  switch (c) {
    case AssociationClass::D0:   return "d0";
    case AssociationClass::D1:   return "d1";
    case AssociationClass::D2:   return "d2";
    case AssociationClass::None: return "none";
  }
  return "none";
}

AssociationClass association_class(const PitchAssociation& a) noexcept {
  if (!a.distance) return AssociationClass::None;
  if (*a.distance == 0) return AssociationClass::D0;
  if (*a.distance == 1) return AssociationClass::D1;
  return AssociationClass::D2;
}

std::string perception_bin(const PitchName& pitch, const AssociationOptions& options) {
  if (pitch_to_freq(pitch, options.reference).hz() < options.low_register_hz) return "low";
  return pitch.note_label();
}

PerceptionAggregate aggregate_perception(std::span<const ListenerReport> reports, const HarmonicFit& fit,
                                         std::span<const Partial> partials, const AssociationOptions& options) {
  PerceptionAggregate agg;
  agg.report_count = reports.size();
  if (reports.empty()) return agg;
  agg.sample_id = reports.front().sample_id;
  for (const auto& r : reports) {
    if (r.sample_id != agg.sample_id) {
      throw Error(ErrorCode::InvalidSpec, "reports span several samples ('" + agg.sample_id + "', '" +
                                              r.sample_id + "')");
    }
  }

  std::map<std::string, PitchTally> tallies;
  std::map<std::string, std::map<std::string, std::size_t>> bins_by_listener;
  std::map<std::string, ListenerCount> listeners;
  std::map<std::string, std::set<std::string>> labels;
  std::map<std::string, double> cents_sum;

  for (const auto& r : reports) {
    auto assoc = associate_perceived_pitch(r.pitch, fit, partials, options);
    const auto bin = perception_bin(r.pitch, options);
    auto& t = tallies[bin];
    t.bin = bin;
    t.sort_key = bin == "low" ? -1000 : r.pitch.semitone();
    ++t.count;
    t.certainty_sum += r.certainty;
    ++t.classes[static_cast<std::size_t>(association_class(assoc))];
    labels[bin].insert(assoc.label);
    cents_sum[bin] += r.pitch.cents();

    auto& l = listeners[r.listener_id];
    l.listener_id = r.listener_id;
    ++l.reports;
    l.weighted_count += r.certainty;
    if (++bins_by_listener[r.listener_id][bin] > 1) l.has_duplicates = true;

    agg.associations.push_back(std::move(assoc));
  }

  for (auto& [bin, t] : tallies) {
    t.mean_cents = cents_sum[bin] / static_cast<double>(t.count);
    t.labels.assign(labels[bin].begin(), labels[bin].end());
    std::size_t most = 0;
    for (std::size_t c = 0; c < t.classes.size(); ++c) {
      if (t.classes[c] > most) {
        most = t.classes[c];
        t.association = static_cast<AssociationClass>(c);
      }
    }
    agg.tallies.push_back(t);
  }
  std::sort(agg.tallies.begin(), agg.tallies.end(),
            [](const auto& a, const auto& b) { return a.sort_key < b.sort_key; });

  double sum = 0.0;
  for (const auto& [id, l] : listeners) {
    agg.listeners.push_back(l);
    sum += l.weighted_count;
    agg.duplicates_flagged = agg.duplicates_flagged || l.has_duplicates;
  }
  agg.mean_weighted_count = sum / static_cast<double>(listeners.size());
  return agg;
}

nlohmann::json to_json(const PitchAssociation& a) {
  nlohmann::json j;
  j["pitch"] = a.pitch.to_string();
  j["target"] = association_target_name(a.target);
  j["label"] = a.label;
  j["octave_shift"] = a.octave_shift;
  j["d"] = a.distance ? nlohmann::json(*a.distance) : nlohmann::json(nullptr);
  j["error_cents"] = a.distance ? nlohmann::json(a.error_cents) : nlohmann::json(nullptr);
  if (a.harmonic) j["harmonic"] = *a.harmonic;
  if (a.partial_index) j["partial_index"] = *a.partial_index;
  return j;
}

nlohmann::json to_json(const PerceptionAggregate& agg) {
  nlohmann::json j;
  j["sample_id"] = agg.sample_id;
  j["report_count"] = agg.report_count;
  j["mean_weighted_count"] =
      agg.mean_weighted_count ? nlohmann::json(*agg.mean_weighted_count) : nlohmann::json(nullptr);
  j["duplicates_flagged"] = agg.duplicates_flagged;
  auto tallies = nlohmann::json::array();
  for (const auto& t : agg.tallies) {
    nlohmann::json breakdown;
    for (std::size_t c = 0; c < t.classes.size(); ++c) {
      breakdown[std::string(association_class_name(static_cast<AssociationClass>(c)))] = t.classes[c];
    }
    tallies.push_back({{"bin", t.bin},
                       {"count", t.count},
                       {"certainty_sum", t.certainty_sum},
                       {"mean_cents", t.mean_cents},
                       {"association", association_class_name(t.association)},
                       {"breakdown", breakdown},
                       {"labels", t.labels}});
  }
  j["tallies"] = tallies;
  auto listeners = nlohmann::json::array();
  for (const auto& l : agg.listeners) {
    listeners.push_back({{"listener_id", l.listener_id},
                         {"reports", l.reports},
                         {"weighted_count", l.weighted_count},
                         {"has_duplicates", l.has_duplicates}});
  }
  j["listeners"] = listeners;
  auto assoc = nlohmann::json::array();
  for (const auto& a : agg.associations) assoc.push_back(to_json(a));
  j["associations"] = assoc;
  return j;
}

std::string perception_bar_csv(const PerceptionAggregate& agg) {
  std::ostringstream out;
  out << "bin,count,certainty_sum,association,labels\n";
  for (const auto& t : agg.tallies) {
    std::string joined;
    for (const auto& l : t.labels) joined += (joined.empty() ? "" : ";") + l;
    out << t.bin << ',' << t.count << ',' << nlohmann::json(t.certainty_sum).dump() << ','
        << association_class_name(t.association) << ',' << joined << '\n';
  }
  return out.str();
}

}  // namespace mph
