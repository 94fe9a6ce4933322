#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "multiphonic/tone_model.hpp"

namespace mph {

inline constexpr double kOutputPeakDbfs = -3.0;

struct SinePartial {
  double hz = 0.0;
  double amplitude = 0.0;  // linear
  double phase = 0.0;      // radians, cosine phase
};

using PartialSet = std::vector<SinePartial>;

struct RenderOptions {
  double duration_s = 1.0;
  double rate = 48000.0;
  std::optional<std::uint64_t> phase_seed;  // random initial phases when set

  void validate() const;
  std::size_t sample_count() const;
};

/// Sum of cosines, peak-normalised to -3 dBFS. Throws InvalidSpec at or above Nyquist.
std::vector<double> resynthesize_partials(std::span<const SinePartial> partials, double duration_s,
                                          double rate);

/// Odd-symmetric saturator tanh(drive * (x + bias)) with the DC of the bias removed,
/// scaled so that full-scale input maps to full-scale output. drive = 0 is identity.
void waveshape(std::span<double> samples, double drive, double bias = 0.0);

/// Scales to the -3 dBFS peak; silence stays silent.
void normalize_peak(std::span<double> samples);

/// Partial k (1-based) of a harmonic series gets amplitude 10^(-rolloff * log2(k) / 20).
std::vector<double> rolloff_amplitudes(std::span<const int> multiples, double rolloff_db_per_oct);

std::vector<double> generate_harmonic_tone(Frequency f0, int n, double rolloff_db_per_oct,
                                           const RenderOptions& render = {});

/// Partials at (2k - 1) * f0, k = 1..n_odd.
std::vector<double> generate_odd_harmonic_tone(Frequency f0, int n_odd, double rolloff_db_per_oct,
                                               const RenderOptions& render = {});

struct PowerChordParams {
  double root_hz = 82.41;
  bool add_octave = false;
  double drive = 2.0;
  double asymmetry = 0.0;  // waveshaper bias; nonzero adds even-order products
};

/// Root, fifth (3/2) and optional octave through the saturator.
std::vector<double> generate_power_chord(const PowerChordParams& p, const RenderOptions& render = {});

struct FmParams {
  double carrier_hz = 236.0;
  double modulator_hz = 32.0;
  double index = 2.0;
  double drive = 0.0;
  /// Snap sidebands onto the n * modulator lattice with Bessel amplitudes
  /// interpolated at the fractional offset, so the waveform repeats at the
  /// modulator period.
  bool harmonic_lock = false;
  std::vector<SinePartial> extra_partials;  // added before waveshaping
};

std::vector<double> generate_fm_tone(const FmParams& p, const RenderOptions& render = {});

/// Partial list that generate_fm_tone renders in harmonic_lock mode (before drive).
PartialSet fm_lattice_partials(const FmParams& p, double rate);

enum class ToneKind { Harmonic, OddHarmonic, PowerChord, Fm, Partials };

std::string_view tone_kind_name(ToneKind kind) noexcept;

struct ToneSpec {
  ToneKind kind = ToneKind::Harmonic;
  double f0_hz = 87.31;
  int partial_count = 12;
  double rolloff_db_per_oct = 3.0;
  std::vector<double> gains;  // per-partial linear amplitudes; overrides rolloff when non-empty
  PowerChordParams chord{};
  FmParams fm{};
  PartialSet partials;  // kind = partials
  double drive = 0.0;   // harmonic/odd-harmonic/partials waveshaping
  RenderOptions render{};
};

/// Throws InvalidSpec listing every offending field.
void validate_tone_spec(const ToneSpec& spec);

std::vector<double> render_tone(const ToneSpec& spec);

ToneSpec tone_spec_from_json(const nlohmann::json& j);
nlohmann::json tone_spec_to_json(const ToneSpec& spec);

inline constexpr std::string_view kToneSpecSchemaVersion = "1.0";

}  // namespace mph
