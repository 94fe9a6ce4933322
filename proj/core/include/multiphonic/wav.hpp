#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mph {

enum class SampleFormat { Pcm16, Pcm24, Float32 };

std::string_view sample_format_name(SampleFormat f) noexcept;

inline constexpr double kMinWavRate = 22050.0;
inline constexpr double kMaxWavRate = 96000.0;

struct Audio {
  std::vector<double> samples;  // first channel, [-1, 1]
  double rate = 0.0;
  unsigned channels = 1;
  SampleFormat format = SampleFormat::Pcm16;
  std::string comment;  // LIST/INFO ICMT, if present
};

/// Reads RIFF/WAVE with PCM 16/24-bit or 32-bit float data (plain or
/// extensible header). Throws ErrorCode::Format for unsupported content and
/// ErrorCode::Io when the file cannot be read.
Audio read_wav(const std::filesystem::path& path);
Audio decode_wav(std::span<const unsigned char> bytes);

/// Writes mono audio; samples are clipped to [-1, 1] for integer formats.
/// A non-empty comment is stored as a LIST/INFO ICMT chunk.
void write_wav(const std::filesystem::path& path, std::span<const double> samples, double rate,
               SampleFormat format = SampleFormat::Pcm16, std::string_view comment = {});
std::vector<unsigned char> encode_wav(std::span<const double> samples, double rate,
                                      SampleFormat format = SampleFormat::Pcm16, std::string_view comment = {});

}  // namespace mph
