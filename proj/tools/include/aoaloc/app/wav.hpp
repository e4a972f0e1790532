#pragma once

#include <filesystem>

#include "aoaloc/dsp.hpp"

namespace aoaloc::app {

/// Reads a RIFF/WAVE file. Accepts 32-bit IEEE float and 16-bit integer PCM
/// (plain or WAVE_FORMAT_EXTENSIBLE); integer samples are scaled to
/// [-1, 1). Throws IoError or FormatError.
MultichannelRecording read_wav(const std::filesystem::path& path);

/// Writes 32-bit IEEE float samples, channel k interleaved in slot k.
void write_wav(const std::filesystem::path& path, const MultichannelRecording& rec);

}  // namespace aoaloc::app
