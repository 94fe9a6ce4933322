#include "multiphonic/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "multiphonic/error.hpp"

namespace mph {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::Format, "wav: " + what); }

std::string read_info_comment(const unsigned char* p, std::size_t size) {
  if (size < 4 || std::memcmp(p, "INFO", 4) != 0) return {};
  std::size_t pos = 4;
  while (pos + 8 <= size) {
    const std::uint32_t len = le32(p + pos + 4);
    if (pos + 8 + len > size) break;
    if (std::memcmp(p + pos, "ICMT", 4) == 0) {
      std::string s(reinterpret_cast<const char*>(p + pos + 8), len);
      while (!s.empty() && s.back() == '\0') s.pop_back();
      return s;
    }
    pos += 8 + len + (len & 1);
  }
  return {};
}

}  // namespace

std::string_view sample_format_name(SampleFormat f) noexcept {
  switch (f) {
    case SampleFormat::Pcm16:   return "pcm16";
    case SampleFormat::Pcm24:   return "pcm24";
    case SampleFormat::Float32: return "float32";
  }
  return "pcm16";
}

Audio decode_wav(std::span<const unsigned char> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    bad("not a RIFF/WAVE file");
  }

  Audio audio;
  std::uint16_t tag = 0;
  std::uint16_t bits = 0;
  std::uint16_t block_align = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (available < 16) bad("truncated fmt chunk");
      tag = le16(chunk + 8);
      audio.channels = le16(chunk + 10);
      audio.rate = le32(chunk + 12);
      block_align = le16(chunk + 20);
      bits = le16(chunk + 22);
      if (tag == kFormatExtensible) {
        if (available < 40) bad("truncated extensible fmt chunk");
        tag = le16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = available;
    } else if (std::memcmp(chunk, "LIST", 4) == 0) {
      audio.comment = read_info_comment(chunk + 8, available);
    }
    pos = body + size + (size & 1);
  }

  if (!have_fmt) bad("missing fmt chunk");
  if (!data) bad("missing data chunk");
  if (audio.channels == 0) bad("zero channels");
  if (tag == kFormatPcm && bits == 16) audio.format = SampleFormat::Pcm16;
  else if (tag == kFormatPcm && bits == 24) audio.format = SampleFormat::Pcm24;
  else if (tag == kFormatFloat && bits == 32) audio.format = SampleFormat::Float32;
  else bad("unsupported sample format (tag " + std::to_string(tag) + ", " + std::to_string(bits) + " bits)");
  if (audio.rate < kMinWavRate || audio.rate > kMaxWavRate) {
    bad("sample rate " + std::to_string(static_cast<long>(audio.rate)) + " Hz outside [22050, 96000]");
  }
  const std::size_t width = bits / 8;
  if (block_align != width * audio.channels) bad("inconsistent block alignment");

  const std::size_t frames = data_size / block_align;
  audio.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* s = data + i * block_align;
    switch (audio.format) {
      case SampleFormat::Pcm16:
        audio.samples[i] = static_cast<std::int16_t>(le16(s)) / 32768.0;
        break;
      case SampleFormat::Pcm24: {
        std::int32_t v = s[0] | s[1] << 8 | s[2] << 16;
        if (v & 0x800000) v -= 0x1000000;
        audio.samples[i] = v / 8388608.0;
        break;
      }
      case SampleFormat::Float32:
        audio.samples[i] = std::bit_cast<float>(le32(s));
        break;
    }
  }
  return audio;
}

Audio read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(e.what()) + " ('" + path.string() + "')");
  }
}

std::vector<unsigned char> encode_wav(std::span<const double> samples, double rate, SampleFormat format,
                                      std::string_view comment) {
  if (!(rate > 0.0) || rate != std::floor(rate) || rate > 4294967295.0) {
    throw Error(ErrorCode::InvalidSpec, "wav rate must be a positive integer");
  }
  const std::uint16_t bits = format == SampleFormat::Pcm16 ? 16 : format == SampleFormat::Pcm24 ? 24 : 32;
  const std::uint16_t width = bits / 8;
  const auto data_size = static_cast<std::uint32_t>(samples.size() * width);

  std::vector<unsigned char> list;
  if (!comment.empty()) {
    std::string text(comment);
    text.push_back('\0');
    if (text.size() & 1) text.push_back('\0');
    put_tag(list, "INFO");
    put_tag(list, "ICMT");
    put32(list, static_cast<std::uint32_t>(text.size()));
    list.insert(list.end(), text.begin(), text.end());
  }

  std::vector<unsigned char> out;
  out.reserve(44 + data_size + list.size() + 8);
  put_tag(out, "RIFF");
  put32(out, static_cast<std::uint32_t>(4 + 24 + (list.empty() ? 0 : 8 + list.size()) + 8 + data_size + (data_size & 1)));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put32(out, 16);
  put16(out, format == SampleFormat::Float32 ? kFormatFloat : kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(rate));
  put32(out, static_cast<std::uint32_t>(rate) * width);
  put16(out, width);
  put16(out, bits);
  if (!list.empty()) {
    put_tag(out, "LIST");
    put32(out, static_cast<std::uint32_t>(list.size()));
    out.insert(out.end(), list.begin(), list.end());
  }
  put_tag(out, "data");
  put32(out, data_size);
  for (double x : samples) {
    const double c = std::clamp(x, -1.0, 1.0);
    switch (format) {
      case SampleFormat::Pcm16:
        put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(std::min(c * 32768.0, 32767.0)))));
        break;
      case SampleFormat::Pcm24: {
        const auto v = static_cast<std::int32_t>(std::lround(std::min(c * 8388608.0, 8388607.0)));
        out.push_back(static_cast<unsigned char>(v));
        out.push_back(static_cast<unsigned char>(v >> 8));
        out.push_back(static_cast<unsigned char>(v >> 16));
        break;
      }
      case SampleFormat::Float32:
        put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
        break;
    }
  }
  if (data_size & 1) out.push_back(0);
  return out;
}

void write_wav(const std::filesystem::path& path, std::span<const double> samples, double rate, SampleFormat format,
               std::string_view comment) {
  const auto bytes = encode_wav(samples, rate, format, comment);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

}  // namespace mph
