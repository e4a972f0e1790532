#include "aoaloc/app/wav.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "aoaloc/app/errors.hpp"

namespace aoaloc::app {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}
void put32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}
void put_tag(std::vector<unsigned char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

MultichannelRecording read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("'" + name + "' is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (available < 16) throw FormatError("'" + name + "': truncated fmt chunk");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == kFormatExtensible) {
        if (available < 40) throw FormatError("'" + name + "': truncated extensible fmt chunk");
        format = le16(chunk + 8 + 24);  // first two bytes of the subformat GUID
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = available;
    }
    pos = body + size + (size & 1u);
  }

  if (channels == 0 || rate == 0) throw FormatError("'" + name + "': missing or empty fmt chunk");
  if (data == nullptr) throw FormatError("'" + name + "': missing data chunk");
  const bool is_float = format == kFormatFloat && bits == 32;
  const bool is_pcm16 = format == kFormatPcm && bits == 16;
  if (!is_float && !is_pcm16) {
    throw FormatError("'" + name + "': unsupported sample format (format tag " +
                      std::to_string(format) + ", " + std::to_string(bits) +
                      " bits); expected 32-bit float or 16-bit PCM");
  }

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  MultichannelRecording rec;
  rec.sample_rate = static_cast<double>(rate);
  rec.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t ch = 0; ch < channels; ++ch) {
      const unsigned char* p = data + (f * channels + ch) * width;
      if (is_float) {
        rec.channels[ch][f] = static_cast<double>(std::bit_cast<float>(le32(p)));
      } else {
        rec.channels[ch][f] = static_cast<double>(static_cast<std::int16_t>(le16(p))) / 32768.0;
      }
    }
  }
  return rec;
}

void write_wav(const std::filesystem::path& path, const MultichannelRecording& rec) {
  rec.validate();
  const auto channels = static_cast<std::uint16_t>(rec.num_channels());
  const auto frames = static_cast<std::uint32_t>(rec.length());
  const auto rate = static_cast<std::uint32_t>(std::lround(rec.sample_rate));
  const std::uint32_t data_bytes = frames * channels * 4u;

  std::vector<unsigned char> out;
  out.reserve(58 + data_bytes);
  put_tag(out, "RIFF");
  put32(out, 4 + (8 + 18) + (8 + 4) + (8 + data_bytes));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put32(out, 18);
  put16(out, kFormatFloat);
  put16(out, channels);
  put32(out, rate);
  put32(out, rate * channels * 4u);
  put16(out, static_cast<std::uint16_t>(channels * 4u));
  put16(out, 32);
  put16(out, 0);
  put_tag(out, "fact");
  put32(out, 4);
  put32(out, frames);
  put_tag(out, "data");
  put32(out, data_bytes);
  for (std::uint32_t f = 0; f < frames; ++f) {
    for (std::uint16_t ch = 0; ch < channels; ++ch) {
      put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(rec.channels[ch][f])));
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace aoaloc::app
