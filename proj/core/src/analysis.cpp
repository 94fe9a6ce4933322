#include "multiphonic/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "multiphonic/error.hpp"

namespace mph {

std::string_view toolkit_version() noexcept { return MPH_VERSION_STRING; }

void AnalysisConfig::validate() const {
  window.validate();
  peaks.validate();
  f0_search.validate();
  modulation_search.validate();
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::Configuration, what);
  };
  require(phon >= 20.0 && phon <= 90.0, "phon must lie in [20, 90]");
  require(smoothing_bandwidth_hz > 0.0, "smoothing_bandwidth_hz must be positive");
  require(frame_offset_s >= 0.0, "frame_offset_s must be >= 0");
  require(assignment_tolerance_cents > 0.0, "assignment_tolerance_cents must be positive");
  require(gcd_tolerance_cents > 0.0, "gcd_tolerance_cents must be positive");
  require(carrier_max_hz > modulation_search.max_hz, "carrier_max_hz must exceed the modulation range");
  require(thresholds.min_assigned_fraction >= 0.0 && thresholds.min_assigned_fraction <= 1.0,
          "min_assigned_fraction must lie in [0, 1]");
  require(thresholds.min_harmonic_coverage >= 0.0 && thresholds.min_harmonic_coverage <= 1.0,
          "min_harmonic_coverage must lie in [0, 1]");
  require(thresholds.max_rms_cents >= 0.0 && thresholds.max_spacing_offset_cents >= 0.0,
          "harmonicity thresholds must be >= 0");
  require(association.match_tolerance_cents > 0.0 && association.low_register_tolerance_cents > 0.0,
          "association tolerances must be positive");
  require(association.max_octave_shift >= 0 && association.max_octave_shift <= 4, "max_octave_shift must lie in [0, 4]");
  require(association.salience_range_db > 0.0, "salience_range_db must be positive");
  require(voicing_threshold >= 0.0 && voicing_threshold <= 1.0, "voicing_threshold must lie in [0, 1]");
  require(jump_tolerance_cents >= 0.0 && jump_tolerance_cents < 600.0, "jump_tolerance_cents must lie in [0, 600)");
}

namespace {

class ConfigReader {
 public:
  explicit ConfigReader(std::vector<std::string>& errors) : errors_(errors) {}

  const nlohmann::json* section(const nlohmann::json& j, const std::string& key, const std::string& prefix) {
    if (!j.contains(key)) return nullptr;
    if (!j[key].is_object()) {
      errors_.push_back(prefix + key + " (not an object)");
      return nullptr;
    }
    return &j[key];
  }

  void unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const std::string& prefix) {
    for (const auto& [k, v] : j.items()) {
      if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; })) {
        errors_.push_back(prefix + k + " (unknown)");
      }
    }
  }

  void number(const nlohmann::json& j, const char* key, double& dst, const std::string& prefix) {
    if (!j.contains(key)) return;
    if (j[key].is_number()) dst = j[key].get<double>();
    else errors_.push_back(prefix + key + " (not a number)");
  }

  template <class Int>
  void integer(const nlohmann::json& j, const char* key, Int& dst, const std::string& prefix) {
    if (!j.contains(key)) return;
    if (j[key].is_number_integer() && (std::is_signed_v<Int> || j[key].get<long long>() >= 0)) {
      dst = j[key].get<Int>();
    } else {
      errors_.push_back(prefix + key + " (not a valid integer)");
    }
  }

  void boolean(const nlohmann::json& j, const char* key, bool& dst, const std::string& prefix) {
    if (!j.contains(key)) return;
    if (j[key].is_boolean()) dst = j[key].get<bool>();
    else errors_.push_back(prefix + key + " (not a boolean)");
  }

 private:
  std::vector<std::string>& errors_;
};

}  // namespace

AnalysisConfig config_from_json(const nlohmann::json& j, AnalysisConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::Configuration, "config must be a JSON object");
  std::vector<std::string> errors;
  ConfigReader r(errors);
  r.unknown(j,
            {"schema_version", "window", "peaks", "weighting", "smoothing_bandwidth_hz", "frame_offset_s", "f0_search",
             "harmonicity", "gcd_tolerance_cents", "carrier_modulation", "association", "tracker"},
            "");
  if (j.contains("schema_version") &&
      (!j["schema_version"].is_string() || j["schema_version"].get<std::string>() != kConfigSchemaVersion)) {
    errors.emplace_back("schema_version (expected \"" + std::string(kConfigSchemaVersion) + "\")");
  }

  if (const auto* w = r.section(j, "window", "")) {
    r.unknown(*w, {"length", "hop", "zero_pad_factor", "shape", "frames"}, "window.");
    r.integer(*w, "length", c.window.window_length, "window.");
    r.integer(*w, "hop", c.window.hop, "window.");
    r.integer(*w, "zero_pad_factor", c.window.zero_pad_factor, "window.");
    r.integer(*w, "frames", c.window.frames, "window.");
    if (w->contains("shape")) {
      try {
        c.window.shape = parse_window_shape((*w)["shape"].get<std::string>());
      } catch (const std::exception&) {
        errors.emplace_back("window.shape (unknown window)");
      }
    }
  }
  if (const auto* p = r.section(j, "peaks", "")) {
    r.unknown(*p, {"relative_floor_db", "min_prominence_db", "max_partials"}, "peaks.");
    r.number(*p, "relative_floor_db", c.peaks.relative_floor_db, "peaks.");
    r.number(*p, "min_prominence_db", c.peaks.min_prominence_db, "peaks.");
    r.integer(*p, "max_partials", c.peaks.max_partials, "peaks.");
  }
  if (const auto* w = r.section(j, "weighting", "")) {
    r.unknown(*w, {"enabled", "phon"}, "weighting.");
    r.boolean(*w, "enabled", c.weighting, "weighting.");
    r.number(*w, "phon", c.phon, "weighting.");
  }
  r.number(j, "smoothing_bandwidth_hz", c.smoothing_bandwidth_hz, "");
  r.number(j, "frame_offset_s", c.frame_offset_s, "");
  if (const auto* f = r.section(j, "f0_search", "")) {
    r.unknown(*f, {"min_hz", "max_hz"}, "f0_search.");
    r.number(*f, "min_hz", c.f0_search.min_hz, "f0_search.");
    r.number(*f, "max_hz", c.f0_search.max_hz, "f0_search.");
  }
  if (const auto* h = r.section(j, "harmonicity", "")) {
    r.unknown(*h, {"assignment_tolerance_cents", "min_assigned_fraction", "max_rms_cents", "max_spacing_offset_cents",
                  "min_harmonic_coverage"},
              "harmonicity.");
    r.number(*h, "assignment_tolerance_cents", c.assignment_tolerance_cents, "harmonicity.");
    r.number(*h, "min_assigned_fraction", c.thresholds.min_assigned_fraction, "harmonicity.");
    r.number(*h, "max_rms_cents", c.thresholds.max_rms_cents, "harmonicity.");
    r.number(*h, "max_spacing_offset_cents", c.thresholds.max_spacing_offset_cents, "harmonicity.");
    r.number(*h, "min_harmonic_coverage", c.thresholds.min_harmonic_coverage, "harmonicity.");
  }
  r.number(j, "gcd_tolerance_cents", c.gcd_tolerance_cents, "");
  if (const auto* m = r.section(j, "carrier_modulation", "")) {
    r.unknown(*m, {"enabled", "min_hz", "max_hz", "carrier_max_hz"}, "carrier_modulation.");
    r.boolean(*m, "enabled", c.carrier_modulation, "carrier_modulation.");
    r.number(*m, "min_hz", c.modulation_search.min_hz, "carrier_modulation.");
    r.number(*m, "max_hz", c.modulation_search.max_hz, "carrier_modulation.");
    r.number(*m, "carrier_max_hz", c.carrier_max_hz, "carrier_modulation.");
  }
  if (const auto* a = r.section(j, "association", "")) {
    r.unknown(*a,
              {"match_tolerance_cents", "low_register_hz", "low_register_tolerance_cents", "max_octave_shift",
               "salience_range_db", "reference_hz"},
              "association.");
    r.number(*a, "match_tolerance_cents", c.association.match_tolerance_cents, "association.");
    r.number(*a, "low_register_hz", c.association.low_register_hz, "association.");
    r.number(*a, "low_register_tolerance_cents", c.association.low_register_tolerance_cents, "association.");
    r.integer(*a, "max_octave_shift", c.association.max_octave_shift, "association.");
    r.number(*a, "salience_range_db", c.association.salience_range_db, "association.");
    double ref = c.association.reference.hz();
    r.number(*a, "reference_hz", ref, "association.");
    if (!(ref > 0.0) || !std::isfinite(ref)) errors.emplace_back("association.reference_hz (must be positive)");
    else c.association.reference = Frequency{ref};
  }
  if (const auto* t = r.section(j, "tracker", "")) {
    r.unknown(*t, {"voicing_threshold", "jump_tolerance_cents", "confidence_weighted"}, "tracker.");
    r.number(*t, "voicing_threshold", c.voicing_threshold, "tracker.");
    r.number(*t, "jump_tolerance_cents", c.jump_tolerance_cents, "tracker.");
    r.boolean(*t, "confidence_weighted", c.confidence_weighted, "tracker.");
  }

  if (!errors.empty()) {
    std::string msg = "invalid config fields:";
    for (const auto& e : errors) msg += " " + e;
    throw Error(ErrorCode::Configuration, msg);
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const AnalysisConfig& c) {
  nlohmann::json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["window"] = {{"length", c.window.window_length},
                 {"hop", c.window.hop},
                 {"zero_pad_factor", c.window.zero_pad_factor},
                 {"shape", window_shape_name(c.window.shape)},
                 {"frames", c.window.frames}};
  j["peaks"] = {{"relative_floor_db", c.peaks.relative_floor_db},
                {"min_prominence_db", c.peaks.min_prominence_db},
                {"max_partials", c.peaks.max_partials}};
  j["weighting"] = {{"enabled", c.weighting}, {"phon", c.phon}};
  j["smoothing_bandwidth_hz"] = c.smoothing_bandwidth_hz;
  j["frame_offset_s"] = c.frame_offset_s;
  j["f0_search"] = {{"min_hz", c.f0_search.min_hz}, {"max_hz", c.f0_search.max_hz}};
  j["harmonicity"] = {{"assignment_tolerance_cents", c.assignment_tolerance_cents},
                      {"min_assigned_fraction", c.thresholds.min_assigned_fraction},
                      {"max_rms_cents", c.thresholds.max_rms_cents},
                      {"max_spacing_offset_cents", c.thresholds.max_spacing_offset_cents},
                      {"min_harmonic_coverage", c.thresholds.min_harmonic_coverage}};
  j["gcd_tolerance_cents"] = c.gcd_tolerance_cents;
  j["carrier_modulation"] = {{"enabled", c.carrier_modulation},
                             {"min_hz", c.modulation_search.min_hz},
                             {"max_hz", c.modulation_search.max_hz},
                             {"carrier_max_hz", c.carrier_max_hz}};
  j["association"] = {{"match_tolerance_cents", c.association.match_tolerance_cents},
                      {"low_register_hz", c.association.low_register_hz},
                      {"low_register_tolerance_cents", c.association.low_register_tolerance_cents},
                      {"max_octave_shift", c.association.max_octave_shift},
                      {"salience_range_db", c.association.salience_range_db},
                      {"reference_hz", c.association.reference.hz()}};
  j["tracker"] = {{"voicing_threshold", c.voicing_threshold},
                  {"jump_tolerance_cents", c.jump_tolerance_cents},
                  {"confidence_weighted", c.confidence_weighted}};
  return j;
}

AnalysisResult analyze_samples(std::span<const double> samples, SampleInfo info, const AnalysisConfig& config) {
  config.validate();
  if (!(info.rate > 0.0)) throw Error(ErrorCode::Configuration, "sample rate must be positive");
  const auto offset = static_cast<std::size_t>(std::llround(config.frame_offset_s * info.rate));
  const std::size_t needed = config.window.required_samples();
  if (samples.size() < offset + needed) {
    throw Error(ErrorCode::InsufficientData,
                "signal has " + std::to_string(samples.size()) + " samples, analysis frame needs " +
                    std::to_string(offset + needed) + " (offset " + std::to_string(offset) + " + " +
                    std::to_string(needed) + ")");
  }
  info.sample_count = samples.size();
  const auto frame = samples.subspan(offset, needed);

  auto raw = compute_power_spectrum(frame, info.rate, config.window);
  std::optional<Spectrum> weighted;
  if (config.weighting) weighted = apply_equal_loudness_weighting(raw, LoudnessContour::iso226(config.phon));
  auto smoothed = smooth_spectrum(weighted ? *weighted : raw, config.smoothing_bandwidth_hz);

  AnalysisResult r{.sample = std::move(info), .config = config, .raw = std::move(raw),
                   .weighted = std::move(weighted), .smoothed = std::move(smoothed)};
  r.partials = extract_partials(r.analysis_spectrum(), config.peaks);

  try {
    r.temporal_f0 = autocorrelation_f0(frame, r.sample.rate, config.f0_search);
    if (!r.temporal_f0) r.warnings.emplace_back("temporal: no autocorrelation peak in the search range");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    r.warnings.push_back(std::string("temporal: ") + e.what());
  }

  if (r.partials.size() >= 2) {
    r.spacing = partial_spacings(r.partials);
    r.gcd = approximate_gcd(r.spacing->spacings, config.gcd_tolerance_cents);
    try {
      r.fit = fit_least_deviating_series(r.partials, FitOptions{config.f0_search, config.assignment_tolerance_cents});
      r.partials = annotate_partials(r.partials, *r.fit);
      r.classification = classify_harmonicity(*r.fit, *r.spacing, config.thresholds);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateFit) throw;
      r.warnings.push_back(std::string("harmonicity: ") + e.what());
    }
  } else {
    r.warnings.emplace_back("harmonicity: fewer than two partials, no harmonic fit");
  }

  if (config.carrier_modulation) {
    DecomposeOptions opts;
    opts.window = config.window;
    opts.peaks = config.peaks;
    opts.smoothing_bandwidth_hz = config.smoothing_bandwidth_hz;
    opts.modulation_search = config.modulation_search;
    opts.carrier_max_hz = config.carrier_max_hz;
    opts.phon = config.phon;
    try {
      r.carrier_modulation = decompose_carrier_modulation(frame, r.sample.rate, opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData && e.code() != ErrorCode::Configuration) throw;
      r.warnings.push_back(std::string("carrier-modulation: ") + e.what());
    }
  }
  return r;
}

double power_db(double p) noexcept { return p > 1e-30 ? 10.0 * std::log10(p) : -300.0; }

nlohmann::json spectrum_summary(const Spectrum& s) {
  const auto p = s.powers();
  const auto it = std::max_element(p.begin(), p.end());
  const auto k = static_cast<std::size_t>(it - p.begin());
  return {{"kind", spectrum_kind_name(s.kind())},
          {"bins", s.size()},
          {"bin_spacing_hz", s.bin_spacing()},
          {"total_power", s.total_power()},
          {"peak_hz", s.empty() ? 0.0 : s.frequencies()[k]},
          {"peak_db", s.empty() ? -300.0 : power_db(*it)}};
}

nlohmann::json spectrum_to_json(const Spectrum& s) {
  std::vector<double> db(s.size());
  std::transform(s.powers().begin(), s.powers().end(), db.begin(), power_db);
  return {{"kind", spectrum_kind_name(s.kind())},
          {"sample_rate", s.sample_rate()},
          {"window_length", s.window_length()},
          {"freq_hz", std::vector<double>(s.frequencies().begin(), s.frequencies().end())},
          {"power_db", db}};
}

nlohmann::json to_json(const F0Estimate& e) {
  return {{"freq_hz", e.frequency.hz()},
          {"pitch", freq_to_pitch(e.frequency).to_string()},
          {"salience", e.salience},
          {"method", f0_method_name(e.method)}};
}

nlohmann::json to_json(const HarmonicFit& fit) {
  auto assignments = nlohmann::json::array();
  for (const auto& a : fit.assignments) {
    assignments.push_back(
        {{"partial_index", a.partial_index}, {"harmonic", a.harmonic}, {"deviation_cents", a.deviation_cents}});
  }
  return {{"f0_hz", fit.f0.hz()},
          {"f0_pitch", freq_to_pitch(fit.f0).to_string()},
          {"assignments", assignments},
          {"unassigned", fit.unassigned},
          {"rms_deviation_cents", fit.rms_deviation_cents},
          {"tolerance_cents", fit.tolerance_cents},
          {"partial_count", fit.partial_count},
          {"assigned_fraction", fit.assigned_fraction()}};
}

nlohmann::json to_json(const HarmonicityClass& c) {
  return {{"label", harmonicity_name(c.label)},
          {"evidence",
           {{"rms_deviation_cents", c.evidence.rms_deviation_cents},
            {"assigned_fraction", c.evidence.assigned_fraction},
            {"spacing_ratio", c.evidence.spacing_ratio},
            {"folded_spacing_cents", c.evidence.folded_spacing_cents},
            {"harmonic_coverage", c.evidence.harmonic_coverage}}}};
}

nlohmann::json to_json(const CarrierModulation& cm) {
  auto opt_f0 = [](const std::optional<F0Estimate>& e) { return e ? to_json(*e) : nlohmann::json(nullptr); };
  auto opt_num = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"carrier", opt_f0(cm.carrier)},
          {"modulation", opt_f0(cm.modulation)},
          {"sideband_spacing_hz", opt_num(cm.sideband_spacing_hz)},
          {"weighted_envelope_peak_hz", opt_num(cm.weighted_envelope_peak_hz)}};
}

nlohmann::json to_json(const AnalysisResult& r) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["toolkit_version"] = toolkit_version();
  j["sample"] = {{"id", r.sample.id},
                 {"rate", r.sample.rate},
                 {"sample_count", r.sample.sample_count},
                 {"duration_s", static_cast<double>(r.sample.sample_count) / r.sample.rate},
                 {"channels", r.sample.channels},
                 {"format", r.sample.format}};
  j["config"] = config_to_json(r.config);

  nlohmann::json spectra;
  spectra["raw"] = spectrum_summary(r.raw);
  spectra["weighted"] = r.weighted ? spectrum_summary(*r.weighted) : nlohmann::json(nullptr);
  spectra["smoothed"] = spectrum_summary(r.smoothed);
  j["spectra"] = spectra;

  auto partials = nlohmann::json::array();
  for (const auto& p : r.partials) {
    partials.push_back({{"freq_hz", p.hz()},
                        {"power", p.power()},
                        {"power_db", power_db(p.power())},
                        {"pitch", freq_to_pitch(p.frequency(), r.config.association.reference).to_string()},
                        {"harmonic", p.harmonic_index() ? nlohmann::json(*p.harmonic_index()) : nlohmann::json(nullptr)}});
  }
  j["partials"] = partials;

  nlohmann::json f0;
  f0["temporal"] = r.temporal_f0 ? to_json(*r.temporal_f0) : nlohmann::json(nullptr);
  f0["spectral"] = r.fit ? to_json(F0Estimate{r.fit->f0, r.fit->assigned_fraction(), F0Method::SpectralFit})
                         : nlohmann::json(nullptr);
  f0["spacing_gcd"] = r.gcd ? to_json(F0Estimate{r.gcd->divisor, r.gcd->fit_fraction, F0Method::SpacingGcd})
                            : nlohmann::json(nullptr);
  if (r.temporal_f0 && r.fit) {
    f0["temporal_vs_spectral_cents"] = cents_between(r.fit->f0, r.temporal_f0->frequency);
  } else {
    f0["temporal_vs_spectral_cents"] = nullptr;
  }
  j["f0"] = f0;

  if (r.spacing) {
    j["spacing"] = {{"spacings_hz", r.spacing->spacings},
                    {"center_hz", r.spacing->center},
                    {"dispersion_hz", r.spacing->dispersion}};
  } else {
    j["spacing"] = nullptr;
  }
  if (r.gcd) {
    j["gcd"] = {{"divisor_hz", r.gcd->divisor.hz()},
                {"fit_fraction", r.gcd->fit_fraction},
                {"rms_cents", r.gcd->rms_cents},
                {"multiples", r.gcd->multiples},
                {"tolerance_cents", r.config.gcd_tolerance_cents}};
  } else {
    j["gcd"] = nullptr;
  }
  j["harmonic_fit"] = r.fit ? to_json(*r.fit) : nlohmann::json(nullptr);
  j["classification"] = r.classification ? to_json(*r.classification) : nlohmann::json(nullptr);
  j["carrier_modulation"] = r.carrier_modulation ? to_json(*r.carrier_modulation) : nlohmann::json(nullptr);
  j["warnings"] = r.warnings;
  return j;
}

StoredAnalysis stored_analysis_from_json(const nlohmann::json& report) {
  try {
    if (!report.is_object() || report.value("schema_version", std::string{}) != kReportSchemaVersion) {
      throw Error(ErrorCode::Format, "analysis report: missing or unsupported schema_version");
    }
    StoredAnalysis s;
    s.sample_id = report.at("sample").at("id").get<std::string>();
    s.config = config_from_json(report.at("config"));
    for (const auto& p : report.at("partials")) {
      std::optional<int> n;
      if (!p.at("harmonic").is_null()) n = p.at("harmonic").get<int>();
      s.partials.emplace_back(Frequency{p.at("freq_hz").get<double>()}, p.at("power").get<double>(), n);
    }
    const auto& fit = report.at("harmonic_fit");
    if (!fit.is_null()) {
      HarmonicFit h;
      h.f0 = Frequency{fit.at("f0_hz").get<double>()};
      for (const auto& a : fit.at("assignments")) {
        h.assignments.push_back({a.at("partial_index").get<std::size_t>(), a.at("harmonic").get<int>(),
                                 a.at("deviation_cents").get<double>()});
      }
      h.unassigned = fit.at("unassigned").get<std::vector<std::size_t>>();
      h.rms_deviation_cents = fit.at("rms_deviation_cents").get<double>();
      h.tolerance_cents = fit.at("tolerance_cents").get<double>();
      h.partial_count = fit.at("partial_count").get<std::size_t>();
      for (const auto& a : h.assignments) {
        if (a.partial_index >= s.partials.size()) throw Error(ErrorCode::Format, "analysis report: assignment index out of range");
      }
      s.fit = std::move(h);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Format, std::string("analysis report: ") + e.what());
  }
}

namespace {

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

std::string spectrum_csv(const Spectrum& s) {
  std::string out = "freq_hz,power_db\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out += fmt(s.frequencies()[k], 4) + "," + fmt(power_db(s.powers()[k]), 4) + "\n";
  }
  return out;
}

std::string partials_csv(const AnalysisResult& r) {
  std::string out = "freq_hz,power_db,harmonic,pitch\n";
  for (const auto& p : r.partials) {
    out += fmt(p.hz(), 4) + "," + fmt(power_db(p.power()), 4) + "," +
           (p.harmonic_index() ? std::to_string(*p.harmonic_index()) : std::string{}) + "," +
           freq_to_pitch(p.frequency(), r.config.association.reference).to_string() + "\n";
  }
  return out;
}

std::string spacing_csv(const AnalysisResult& r) {
  std::string out = "index,low_hz,high_hz,spacing_hz\n";
  if (!r.spacing) return out;
  for (std::size_t i = 0; i < r.spacing->spacings.size(); ++i) {
    out += std::to_string(i) + "," + fmt(r.partials[i].hz(), 4) + "," + fmt(r.partials[i + 1].hz(), 4) + "," +
           fmt(r.spacing->spacings[i], 4) + "\n";
  }
  return out;
}

std::string f0_markers_csv(const AnalysisResult& r) {
  std::string out = "method,freq_hz,pitch,salience\n";
  auto row = [&](std::string_view method, const F0Estimate& e) {
    out += std::string(method) + "," + fmt(e.frequency.hz(), 4) + "," +
           freq_to_pitch(e.frequency, r.config.association.reference).to_string() + "," + fmt(e.salience, 4) + "\n";
  };
  if (r.temporal_f0) row("autocorrelation", *r.temporal_f0);
  if (r.fit) row("spectral-fit", F0Estimate{r.fit->f0, r.fit->assigned_fraction(), F0Method::SpectralFit});
  if (r.gcd) row("spacing-gcd", F0Estimate{r.gcd->divisor, r.gcd->fit_fraction, F0Method::SpacingGcd});
  if (r.carrier_modulation) {
    if (r.carrier_modulation->carrier) row("carrier", *r.carrier_modulation->carrier);
    if (r.carrier_modulation->modulation) row("modulation", *r.carrier_modulation->modulation);
  }
  return out;
}

}  // namespace mph
