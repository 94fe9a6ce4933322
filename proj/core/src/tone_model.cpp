#include "multiphonic/tone_model.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "multiphonic/error.hpp"

namespace mph {

namespace {

constexpr std::array<std::string_view, 12> kClassNames = {
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};

// Natural-note offsets for letters A..G.
constexpr std::array<int, 7> kLetterSemitone = {9, 11, 0, 2, 4, 5, 7};

constexpr std::string_view kUtf8Sharp = "\xE2\x99\xAF";  // U+266F
constexpr std::string_view kUtf8Flat = "\xE2\x99\xAD";   // U+266D

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

[[noreturn]] void bad_pitch(std::string_view text, const char* why) {
  throw Error(ErrorCode::Format, "malformed pitch '" + std::string(text) + "': " + why);
}

}  // namespace

Frequency::Frequency(double hz) : hz_(hz) {
  if (!std::isfinite(hz) || hz <= 0.0) {
    throw Error(ErrorCode::InvalidFrequency,
                "frequency must be positive and finite, got " + std::to_string(hz));
  }
}

std::string_view pitch_class_name(PitchClass pc) noexcept {
  return kClassNames[static_cast<std::size_t>(pc)];
}

PitchName::PitchName(PitchClass pc, int octave, double cents) {
  *this = from_semitone(12 * (octave + 1) + static_cast<int>(pc), cents);
}

PitchName PitchName::from_semitone(int semitone, double cents) {
  if (!std::isfinite(cents)) throw Error(ErrorCode::Format, "cent offset must be finite");
  // Fold into [-50, +50): a tie at +50 moves up to the next semitone at -50.
  const double shift = std::floor((cents + 50.0) / 100.0);
  semitone += static_cast<int>(shift);
  cents -= 100.0 * shift;
  if (cents >= 50.0) {
    semitone += 1;
    cents -= 100.0;
  }
  if (cents < -50.0) cents = -50.0;

  PitchName p;
  p.octave_ = floor_div(semitone, 12) - 1;
  p.pitch_class_ = static_cast<PitchClass>(semitone - 12 * floor_div(semitone, 12));
  p.cents_ = cents;
  return p;
}

PitchName PitchName::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) bad_pitch(text, "empty");

  const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(s.front())));
  if (letter < 'A' || letter > 'G') bad_pitch(text, "expected note letter A-G");
  int semitone_in_octave = kLetterSemitone[static_cast<std::size_t>(letter - 'A')];
  s.remove_prefix(1);

  if (s.starts_with('#')) {
    ++semitone_in_octave;
    s.remove_prefix(1);
  } else if (s.starts_with(kUtf8Sharp)) {
    ++semitone_in_octave;
    s.remove_prefix(kUtf8Sharp.size());
  } else if (s.starts_with(kUtf8Flat)) {
    --semitone_in_octave;
    s.remove_prefix(kUtf8Flat.size());
  } else if (s.size() >= 2 && s.front() == 'b' &&
             (std::isdigit(static_cast<unsigned char>(s[1])) || s[1] == '-')) {
    --semitone_in_octave;
    s.remove_prefix(1);
  }

  int octave = 0;
  {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, octave);
    if (ec != std::errc{} || ptr == begin) bad_pitch(text, "expected octave number");
    s.remove_prefix(static_cast<std::size_t>(ptr - begin));
  }

  double cents = 0.0;
  if (!s.empty()) {
    if (s.front() != '+' && s.front() != '-') bad_pitch(text, "expected +/-<cents>ct suffix");
    const bool negative = s.front() == '-';
    s.remove_prefix(1);
    if (!s.ends_with("ct")) bad_pitch(text, "cent suffix must end with 'ct'");
    s.remove_suffix(2);
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, cents);
    if (ec != std::errc{} || ptr != end || s.empty()) bad_pitch(text, "bad cent value");
    if (negative) cents = -cents;
  }

  return from_semitone(12 * (octave + 1) + semitone_in_octave, cents);
}

std::string PitchName::note_label() const {
  return std::string(pitch_class_name(pitch_class_)) + std::to_string(octave_);
}

std::string PitchName::to_string(int cent_decimals) const {
  std::string out = note_label();
  const double scale = std::pow(10.0, cent_decimals);
  const double rounded = std::round(cents_ * scale) / scale;
  if (rounded != 0.0) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.*fct", cent_decimals, rounded);
    out += buf;
  }
  return out;
}

PitchName freq_to_pitch(Frequency f, Frequency reference) {
  const double x = 69.0 + 12.0 * std::log2(f.hz() / reference.hz());
  const double n = std::floor(x + 0.5);
  return PitchName::from_semitone(static_cast<int>(n), (x - n) * 100.0);
}

Frequency pitch_to_freq(const PitchName& p, Frequency reference) {
  return Frequency{reference.hz() * std::exp2((p.fractional_semitone() - 69.0) / 12.0)};
}

double cents_between(Frequency a, Frequency b) { return 1200.0 * std::log2(b.hz() / a.hz()); }

Partial::Partial(Frequency frequency, double power, std::optional<int> harmonic_index)
    : frequency_(frequency), power_(power) {
  if (!std::isfinite(power) || power < 0.0) {
    throw Error(ErrorCode::InvalidSpec, "partial power must be finite and non-negative");
  }
  set_harmonic_index(harmonic_index);
}

void Partial::set_harmonic_index(std::optional<int> n) {
  if (n && *n < 1) throw Error(ErrorCode::InvalidSpec, "harmonic index must be >= 1");
  harmonic_index_ = n;
}

}  // namespace mph
