#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace mph {

/// Positive, finite frequency in Hz. Construction throws ErrorCode::InvalidFrequency otherwise.
class Frequency {
 public:
  explicit Frequency(double hz);

  double hz() const noexcept { return hz_; }

  friend auto operator<=>(const Frequency&, const Frequency&) = default;

 private:
  double hz_;
};

inline constexpr double kDefaultReferenceHz = 440.0;  // A4

/// Returns the default tuning reference (A4 = 440 Hz).
inline Frequency default_reference() { return Frequency{kDefaultReferenceHz}; }

enum class PitchClass : int { C = 0, Cs, D, Ds, E, F, Fs, G, Gs, A, As, B };

std::string_view pitch_class_name(PitchClass pc) noexcept;

/// Equal-tempered pitch in scientific pitch notation (C4 = middle C, MIDI 60)
/// with a signed cent offset in [-50, +50).
class PitchName {
 public:
  PitchName() = default;
  PitchName(PitchClass pc, int octave, double cents = 0.0);

  /// Builds from a MIDI-style semitone index plus cents; cents are folded
  /// into [-50, +50) by moving to the neighbouring semitone.
  static PitchName from_semitone(int semitone, double cents = 0.0);

  /// Parses `<class><octave>[+/-<cents>ct]`, e.g. `A#3+21.5ct`, `Bb2`, `F♯1-3ct`.
  /// Flats are normalised to the enharmonic sharp. Throws ErrorCode::Format.
  static PitchName parse(std::string_view text);

  PitchClass pitch_class() const noexcept { return pitch_class_; }
  int octave() const noexcept { return octave_; }
  double cents() const noexcept { return cents_; }

  /// MIDI note number of the equal-tempered pitch (cents ignored).
  int semitone() const noexcept { return 12 * (octave_ + 1) + static_cast<int>(pitch_class_); }

  /// Semitone index plus cents/100.
  double fractional_semitone() const noexcept { return semitone() + cents_ / 100.0; }

  /// Equal-tempered pitch with the cent offset dropped.
  PitchName quantized() const { return PitchName{pitch_class_, octave_, 0.0}; }

  /// Text form; the cent suffix is omitted when it rounds to zero.
  std::string to_string(int cent_decimals = 1) const;

  /// Pitch class and octave only, e.g. `A#3`.
  std::string note_label() const;

  friend std::partial_ordering operator<=>(const PitchName& a, const PitchName& b) noexcept {
    if (auto c = a.octave_ <=> b.octave_; c != 0) return c;
    if (auto c = a.pitch_class_ <=> b.pitch_class_; c != 0) return c;
    return a.cents_ <=> b.cents_;
  }
  friend bool operator==(const PitchName& a, const PitchName& b) noexcept {
    return a.pitch_class_ == b.pitch_class_ && a.octave_ == b.octave_ && a.cents_ == b.cents_;
  }

 private:
  PitchClass pitch_class_ = PitchClass::A;
  int octave_ = 4;
  double cents_ = 0.0;
};

PitchName freq_to_pitch(Frequency f, Frequency reference = default_reference());
Frequency pitch_to_freq(const PitchName& p, Frequency reference = default_reference());

/// 1200 * log2(b / a).
double cents_between(Frequency a, Frequency b);

/// One spectral component. Power is linear (arbitrary but consistent units).
class Partial {
 public:
  Partial(Frequency frequency, double power, std::optional<int> harmonic_index = std::nullopt);

  Frequency frequency() const noexcept { return frequency_; }
  double hz() const noexcept { return frequency_.hz(); }
  double power() const noexcept { return power_; }
  std::optional<int> harmonic_index() const noexcept { return harmonic_index_; }

  void set_harmonic_index(std::optional<int> n);

 private:
  Frequency frequency_;
  double power_;
  std::optional<int> harmonic_index_;
};

}  // namespace mph
