#include "multiphonic/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "multiphonic/error.hpp"

namespace mph {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double nyquist(double rate) { return 0.5 * rate; }

// Uniform phase from raw generator bits; std distributions differ across libraries.
double draw_phase(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53 * kTwoPi;
}

void assign_phases(PartialSet& ps, const RenderOptions& render) {
  if (!render.phase_seed) return;
  std::mt19937_64 gen(*render.phase_seed);
  for (auto& p : ps) p.phase = draw_phase(gen);
}

void add_partials(std::span<double> out, std::span<const SinePartial> partials, double rate) {
  for (const auto& p : partials) {
    if (p.amplitude == 0.0) continue;
    const double w = kTwoPi * p.hz / rate;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += p.amplitude * std::cos(w * static_cast<double>(i) + p.phase);
    }
  }
}

void check_nyquist(double highest_hz, double drive, double rate, const std::string& what) {
  const double expanded = drive > 0.0 ? 3.0 * highest_hz : highest_hz;
  if (!(expanded < nyquist(rate))) {
    throw Error(ErrorCode::InvalidSpec,
                what + " reaches " + std::to_string(expanded) + " Hz, at or above Nyquist " +
                    std::to_string(nyquist(rate)) + " Hz" + (drive > 0.0 ? " (x3 distortion guard)" : ""));
  }
}

PartialSet series(double f0, std::span<const int> multiples, std::span<const double> amplitudes) {
  PartialSet ps;
  ps.reserve(multiples.size());
  for (std::size_t k = 0; k < multiples.size(); ++k) ps.push_back({f0 * multiples[k], amplitudes[k], 0.0});
  return ps;
}

std::vector<double> render_series(double f0, std::span<const int> multiples, std::span<const double> amplitudes,
                                  double drive, const RenderOptions& render) {
  render.validate();
  if (!(drive >= 0.0)) throw Error(ErrorCode::InvalidSpec, "drive must be >= 0");
  check_nyquist(f0 * multiples.back(), drive, render.rate, "highest partial");
  auto ps = series(f0, multiples, amplitudes);
  assign_phases(ps, render);
  std::vector<double> out(render.sample_count(), 0.0);
  add_partials(out, ps, render.rate);
  if (drive > 0.0) {
    normalize_peak(out);
    waveshape(out, drive);
  }
  normalize_peak(out);
  return out;
}

}  // namespace

void RenderOptions::validate() const {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw Error(ErrorCode::InvalidSpec, "duration must be positive");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(ErrorCode::InvalidSpec, "rate must be positive");
}

std::size_t RenderOptions::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration_s * rate));
}

void normalize_peak(std::span<double> samples) {
  double peak = 0.0;
  for (double x : samples) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return;
  const double scale = std::pow(10.0, kOutputPeakDbfs / 20.0) / peak;
  for (auto& x : samples) x *= scale;
}

void waveshape(std::span<double> samples, double drive, double bias) {
  if (!(drive >= 0.0)) throw Error(ErrorCode::InvalidSpec, "drive must be >= 0");
  if (drive == 0.0) return;
  const double dc = std::tanh(drive * bias);
  const double full = std::tanh(drive * (1.0 + bias)) - dc;
  for (auto& x : samples) x = (std::tanh(drive * (x + bias)) - dc) / full;
}

std::vector<double> resynthesize_partials(std::span<const SinePartial> partials, double duration_s,
                                          double rate) {
  RenderOptions render{duration_s, rate, std::nullopt};
  render.validate();
  for (const auto& p : partials) {
    if (!(p.hz > 0.0) || !std::isfinite(p.hz)) throw Error(ErrorCode::InvalidSpec, "partial frequency must be positive");
    check_nyquist(p.hz, 0.0, rate, "partial");
    if (!(p.amplitude >= 0.0)) throw Error(ErrorCode::InvalidSpec, "partial amplitude must be >= 0");
  }
  std::vector<double> out(render.sample_count(), 0.0);
  add_partials(out, partials, rate);
  normalize_peak(out);
  return out;
}

std::vector<double> rolloff_amplitudes(std::span<const int> multiples, double rolloff_db_per_oct) {
  std::vector<double> amps(multiples.size());
  for (std::size_t k = 0; k < multiples.size(); ++k) {
    amps[k] = std::pow(10.0, -rolloff_db_per_oct * std::log2(static_cast<double>(multiples[k])) / 20.0);
  }
  return amps;
}

std::vector<double> generate_harmonic_tone(Frequency f0, int n, double rolloff_db_per_oct,
                                           const RenderOptions& render) {
  if (n < 1) throw Error(ErrorCode::InvalidSpec, "harmonic count must be >= 1");
  std::vector<int> m(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) m[static_cast<std::size_t>(k)] = k + 1;
  return render_series(f0.hz(), m, rolloff_amplitudes(m, rolloff_db_per_oct), 0.0, render);
}

std::vector<double> generate_odd_harmonic_tone(Frequency f0, int n_odd, double rolloff_db_per_oct,
                                               const RenderOptions& render) {
  if (n_odd < 1) throw Error(ErrorCode::InvalidSpec, "odd harmonic count must be >= 1");
  std::vector<int> m(static_cast<std::size_t>(n_odd));
  for (int k = 0; k < n_odd; ++k) m[static_cast<std::size_t>(k)] = 2 * k + 1;
  return render_series(f0.hz(), m, rolloff_amplitudes(m, rolloff_db_per_oct), 0.0, render);
}

std::vector<double> generate_power_chord(const PowerChordParams& p, const RenderOptions& render) {
  render.validate();
  if (!(p.root_hz > 0.0)) throw Error(ErrorCode::InvalidSpec, "root must be positive");
  if (!(p.drive >= 0.0)) throw Error(ErrorCode::InvalidSpec, "drive must be >= 0");
  PartialSet ps{{p.root_hz, 1.0, 0.0}, {1.5 * p.root_hz, 1.0, 0.0}};
  if (p.add_octave) ps.push_back({2.0 * p.root_hz, 1.0, 0.0});
  check_nyquist(ps.back().hz, p.drive, render.rate, "power chord");
  assign_phases(ps, render);

  std::vector<double> out(render.sample_count(), 0.0);
  add_partials(out, ps, render.rate);
  normalize_peak(out);
  waveshape(out, p.drive, p.asymmetry);
  if (p.asymmetry != 0.0) {
    double mean = 0.0;
    for (double x : out) mean += x;
    mean /= static_cast<double>(std::max<std::size_t>(out.size(), 1));
    for (auto& x : out) x -= mean;
  }
  normalize_peak(out);
  return out;
}

PartialSet fm_lattice_partials(const FmParams& p, double rate) {
  const double fm = p.modulator_hz;
  const int reach = static_cast<int>(std::ceil(p.index)) + 4;
  PartialSet ps;
  const int n_lo = std::max(1, static_cast<int>(std::ceil((p.carrier_hz - reach * fm) / fm)));
  const int n_hi = static_cast<int>(std::floor((p.carrier_hz + reach * fm) / fm));
  for (int n = n_lo; n <= n_hi; ++n) {
    const double hz = n * fm;
    if (!(hz < nyquist(rate))) break;
    const double u = (hz - p.carrier_hz) / fm;
    const double lo = std::floor(u);
    const double t = u - lo;
    auto mag = [&](double k) { return std::abs(std::cyl_bessel_j(std::abs(k), p.index)); };
    const double amp = (1.0 - t) * mag(lo) + t * mag(lo + 1.0);
    if (amp > 1e-6) ps.push_back({hz, amp, 0.0});
  }
  return ps;
}

std::vector<double> generate_fm_tone(const FmParams& p, const RenderOptions& render) {
  render.validate();
  if (!(p.carrier_hz > 0.0) || !(p.modulator_hz > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "carrier and modulator must be positive");
  }
  if (!(p.index >= 0.0)) throw Error(ErrorCode::InvalidSpec, "modulation index must be >= 0");
  check_nyquist(p.carrier_hz + (p.index + 2.0) * p.modulator_hz, p.drive, render.rate, "fm bandwidth");
  for (const auto& e : p.extra_partials) {
    if (!(e.hz > 0.0)) throw Error(ErrorCode::InvalidSpec, "extra partial frequency must be positive");
    check_nyquist(e.hz, p.drive, render.rate, "extra partial");
  }

  std::vector<double> out(render.sample_count(), 0.0);
  if (p.harmonic_lock && p.index > 0.0) {
    auto ps = fm_lattice_partials(p, render.rate);
    assign_phases(ps, render);
    add_partials(out, ps, render.rate);
  } else {
    double carrier_phase = 0.0;
    if (render.phase_seed) {
      std::mt19937_64 gen(*render.phase_seed);
      carrier_phase = draw_phase(gen);
    }
    const double wc = kTwoPi * p.carrier_hz / render.rate;
    const double wm = kTwoPi * p.modulator_hz / render.rate;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double n = static_cast<double>(i);
      out[i] = std::cos(wc * n + p.index * std::sin(wm * n) + carrier_phase);
    }
  }
  add_partials(out, p.extra_partials, render.rate);
  if (p.drive > 0.0) {
    normalize_peak(out);
    waveshape(out, p.drive);
  }
  normalize_peak(out);
  return out;
}

std::string_view tone_kind_name(ToneKind kind) noexcept {
  switch (kind) {
    case ToneKind::Harmonic:    return "harmonic";
    case ToneKind::OddHarmonic: return "odd-harmonic";
    case ToneKind::PowerChord:  return "power-chord";
    case ToneKind::Fm:          return "fm";
    case ToneKind::Partials:    return "partials";
  }
  return "harmonic";
}

void validate_tone_spec(const ToneSpec& spec) {
  std::vector<std::string> bad;
  const double nyq = nyquist(spec.render.rate);
  auto guard = [&](double highest, double drive) { return (drive > 0.0 ? 3.0 : 1.0) * highest < nyq; };

  if (!(spec.render.duration_s > 0.0) || !std::isfinite(spec.render.duration_s)) bad.emplace_back("duration_s");
  if (!(spec.render.rate > 0.0) || !std::isfinite(spec.render.rate)) bad.emplace_back("rate");
  if (!(spec.drive >= 0.0)) bad.emplace_back("drive");

  switch (spec.kind) {
    case ToneKind::Harmonic:
    case ToneKind::OddHarmonic: {
      if (!(spec.f0_hz > 0.0)) bad.emplace_back("f0_hz");
      if (spec.partial_count < 1) bad.emplace_back("partial_count");
      if (!spec.gains.empty() && spec.gains.size() != static_cast<std::size_t>(std::max(spec.partial_count, 0))) {
        bad.emplace_back("gains");
      }
      const int top = spec.kind == ToneKind::Harmonic ? spec.partial_count : 2 * spec.partial_count - 1;
      if (spec.f0_hz > 0.0 && spec.partial_count >= 1 && !guard(top * spec.f0_hz, spec.drive)) {
        bad.emplace_back(spec.kind == ToneKind::Harmonic ? "f0_hz*partial_count" : "f0_hz*(2*partial_count-1)");
      }
      break;
    }
    case ToneKind::PowerChord: {
      if (!(spec.chord.root_hz > 0.0)) bad.emplace_back("root_hz");
      if (!(spec.chord.drive >= 0.0)) bad.emplace_back("drive");
      const double top = spec.chord.root_hz * (spec.chord.add_octave ? 2.0 : 1.5);
      if (spec.chord.root_hz > 0.0 && !guard(top, spec.chord.drive)) bad.emplace_back("root_hz");
      break;
    }
    case ToneKind::Fm: {
      if (!(spec.fm.carrier_hz > 0.0)) bad.emplace_back("carrier_hz");
      if (!(spec.fm.modulator_hz > 0.0)) bad.emplace_back("modulator_hz");
      if (!(spec.fm.index >= 0.0)) bad.emplace_back("index");
      if (!(spec.fm.drive >= 0.0)) bad.emplace_back("drive");
      if (spec.fm.carrier_hz > 0.0 && spec.fm.modulator_hz > 0.0 && spec.fm.index >= 0.0 &&
          !guard(spec.fm.carrier_hz + (spec.fm.index + 2.0) * spec.fm.modulator_hz, spec.fm.drive)) {
        bad.emplace_back("carrier_hz");
      }
      for (std::size_t i = 0; i < spec.fm.extra_partials.size(); ++i) {
        const auto& e = spec.fm.extra_partials[i];
        if (!(e.hz > 0.0) || !guard(e.hz, spec.fm.drive) || !(e.amplitude >= 0.0)) {
          bad.push_back("extra_partials[" + std::to_string(i) + "]");
        }
      }
      break;
    }
    case ToneKind::Partials:
      for (std::size_t i = 0; i < spec.partials.size(); ++i) {
        const auto& e = spec.partials[i];
        if (!(e.hz > 0.0) || !guard(e.hz, spec.drive) || !(e.amplitude >= 0.0)) {
          bad.push_back("partials[" + std::to_string(i) + "]");
        }
      }
      break;
  }

  if (!bad.empty()) {
    std::string msg = "invalid tone spec fields:";
    for (const auto& b : bad) msg += " " + b;
    throw Error(ErrorCode::InvalidSpec, msg);
  }
}

std::vector<double> render_tone(const ToneSpec& spec) {
  validate_tone_spec(spec);
  switch (spec.kind) {
    case ToneKind::Harmonic:
    case ToneKind::OddHarmonic: {
      std::vector<int> m(static_cast<std::size_t>(spec.partial_count));
      for (int k = 0; k < spec.partial_count; ++k) {
        m[static_cast<std::size_t>(k)] = spec.kind == ToneKind::Harmonic ? k + 1 : 2 * k + 1;
      }
      const auto amps = spec.gains.empty() ? rolloff_amplitudes(m, spec.rolloff_db_per_oct) : spec.gains;
      return render_series(spec.f0_hz, m, amps, spec.drive, spec.render);
    }
    case ToneKind::PowerChord:
      return generate_power_chord(spec.chord, spec.render);
    case ToneKind::Fm:
      return generate_fm_tone(spec.fm, spec.render);
    case ToneKind::Partials: {
      auto ps = spec.partials;
      assign_phases(ps, spec.render);
      auto out = resynthesize_partials(ps, spec.render.duration_s, spec.render.rate);
      if (spec.drive > 0.0) {
        waveshape(out, spec.drive);
        normalize_peak(out);
      }
      return out;
    }
  }
  throw Error(ErrorCode::Internal, "unhandled tone kind");
}

namespace {

ToneKind parse_kind(const std::string& s) {
  for (auto k : {ToneKind::Harmonic, ToneKind::OddHarmonic, ToneKind::PowerChord, ToneKind::Fm, ToneKind::Partials}) {
    if (tone_kind_name(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidSpec, "invalid tone spec fields: kind ('" + s + "')");
}

nlohmann::json partials_to_json(const PartialSet& ps) {
  auto arr = nlohmann::json::array();
  for (const auto& p : ps) arr.push_back({{"hz", p.hz}, {"amplitude", p.amplitude}, {"phase", p.phase}});
  return arr;
}

}  // namespace

ToneSpec tone_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "tone spec must be a JSON object");

  static const std::set<std::string> known{
      "schema_version", "kind",      "f0_hz",        "partial_count", "rolloff_db_per_oct", "gains",
      "drive",          "duration_s", "rate",        "phase_seed",    "root_hz",            "add_octave",
      "asymmetry",      "carrier_hz", "modulator_hz", "index",        "harmonic_lock",      "extra_partials",
      "partials"};
  std::vector<std::string> bad;
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) bad.push_back(key + " (unknown)");
  }

  ToneSpec spec;
  auto number = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (j[key].is_number()) dst = j[key].get<double>();
    else bad.push_back(std::string(key) + " (not a number)");
  };
  auto boolean = [&](const char* key, bool& dst) {
    if (!j.contains(key)) return;
    if (j[key].is_boolean()) dst = j[key].get<bool>();
    else bad.push_back(std::string(key) + " (not a boolean)");
  };
  auto partial_list = [&](const char* key, PartialSet& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) {
      bad.push_back(std::string(key) + " (not an array)");
      return;
    }
    for (std::size_t i = 0; i < j[key].size(); ++i) {
      const auto& e = j[key][i];
      if (!e.is_object() || !e.contains("hz") || !e["hz"].is_number() ||
          (e.contains("amplitude") && !e["amplitude"].is_number()) ||
          (e.contains("phase") && !e["phase"].is_number())) {
        bad.push_back(std::string(key) + "[" + std::to_string(i) + "]");
        continue;
      }
      dst.push_back({e["hz"].get<double>(), e.value("amplitude", 1.0), e.value("phase", 0.0)});
    }
  };

  if (j.contains("schema_version") && (!j["schema_version"].is_string() ||
                                       j["schema_version"].get<std::string>() != kToneSpecSchemaVersion)) {
    bad.emplace_back("schema_version (expected \"" + std::string(kToneSpecSchemaVersion) + "\")");
  }
  if (!j.contains("kind") || !j["kind"].is_string()) {
    bad.emplace_back("kind (missing)");
  } else {
    try {
      spec.kind = parse_kind(j["kind"].get<std::string>());
    } catch (const Error&) {
      bad.push_back("kind ('" + j["kind"].get<std::string>() + "')");
    }
  }
  number("f0_hz", spec.f0_hz);
  if (j.contains("partial_count")) {
    if (j["partial_count"].is_number_integer()) spec.partial_count = j["partial_count"].get<int>();
    else bad.emplace_back("partial_count (not an integer)");
  }
  number("rolloff_db_per_oct", spec.rolloff_db_per_oct);
  if (j.contains("gains")) {
    if (j["gains"].is_array() && std::all_of(j["gains"].begin(), j["gains"].end(),
                                             [](const auto& g) { return g.is_number(); })) {
      spec.gains = j["gains"].get<std::vector<double>>();
    } else {
      bad.emplace_back("gains (not a number array)");
    }
  }
  number("drive", spec.drive);
  if (j.contains("drive")) {
    spec.chord.drive = spec.drive;
    spec.fm.drive = spec.drive;
  }
  number("duration_s", spec.render.duration_s);
  number("rate", spec.render.rate);
  if (j.contains("phase_seed")) {
    if (j["phase_seed"].is_number_unsigned()) spec.render.phase_seed = j["phase_seed"].get<std::uint64_t>();
    else if (!j["phase_seed"].is_null()) bad.emplace_back("phase_seed (not an unsigned integer)");
  }
  number("root_hz", spec.chord.root_hz);
  boolean("add_octave", spec.chord.add_octave);
  number("asymmetry", spec.chord.asymmetry);
  number("carrier_hz", spec.fm.carrier_hz);
  number("modulator_hz", spec.fm.modulator_hz);
  number("index", spec.fm.index);
  boolean("harmonic_lock", spec.fm.harmonic_lock);
  partial_list("extra_partials", spec.fm.extra_partials);
  partial_list("partials", spec.partials);

  if (!bad.empty()) {
    std::string msg = "invalid tone spec fields:";
    for (const auto& b : bad) msg += " " + b;
    throw Error(ErrorCode::InvalidSpec, msg);
  }
  validate_tone_spec(spec);
  return spec;
}

nlohmann::json tone_spec_to_json(const ToneSpec& spec) {
  nlohmann::json j;
  j["schema_version"] = kToneSpecSchemaVersion;
  j["kind"] = tone_kind_name(spec.kind);
  j["duration_s"] = spec.render.duration_s;
  j["rate"] = spec.render.rate;
  if (spec.render.phase_seed) j["phase_seed"] = *spec.render.phase_seed;
  switch (spec.kind) {
    case ToneKind::Harmonic:
    case ToneKind::OddHarmonic:
      j["f0_hz"] = spec.f0_hz;
      j["partial_count"] = spec.partial_count;
      j["rolloff_db_per_oct"] = spec.rolloff_db_per_oct;
      if (!spec.gains.empty()) j["gains"] = spec.gains;
      j["drive"] = spec.drive;
      break;
    case ToneKind::PowerChord:
      j["root_hz"] = spec.chord.root_hz;
      j["add_octave"] = spec.chord.add_octave;
      j["drive"] = spec.chord.drive;
      j["asymmetry"] = spec.chord.asymmetry;
      break;
    case ToneKind::Fm:
      j["carrier_hz"] = spec.fm.carrier_hz;
      j["modulator_hz"] = spec.fm.modulator_hz;
      j["index"] = spec.fm.index;
      j["drive"] = spec.fm.drive;
      j["harmonic_lock"] = spec.fm.harmonic_lock;
      if (!spec.fm.extra_partials.empty()) j["extra_partials"] = partials_to_json(spec.fm.extra_partials);
      break;
    case ToneKind::Partials:
      j["partials"] = partials_to_json(spec.partials);
      j["drive"] = spec.drive;
      break;
  }
  return j;
}

}  // namespace mph
