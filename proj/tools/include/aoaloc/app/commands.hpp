#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "aoaloc/app/config.hpp"

namespace aoaloc::app {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "AOALOC_OUT_DIR";

int cmd_simulate(const std::filesystem::path& scene_path, const std::filesystem::path& out_dir,
                 std::ostream& out);

struct AoaCommand {
  std::filesystem::path wav;
  MicArray array = build_hex_array("array", Point2::Zero(), 0.0);
  double speed_of_sound = PropagationModel{}.speed_of_sound;
  std::optional<std::filesystem::path> spectrum_csv;  // default: <out_dir>/<id>_<method>_spectrum.csv
};

int cmd_aoa(const AoaCommand& command, const PipelineConfig& config,
            const std::filesystem::path& out_dir, std::ostream& out);

int cmd_localize(const std::filesystem::path& manifest_path, const PipelineConfig& config,
                 const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

struct EvalCommand {
  int n_trials = 50;
  std::optional<Rect> bounds;  // default: the default room
  double snr_db = 20.0;
  int echoes = 0;
  double echo_gain = 0.5;
  unsigned threads = 0;
};

int cmd_eval(const EvalCommand& command, const PipelineConfig& config,
             const std::filesystem::path& out_dir, std::ostream& out);

/// Parses arguments and dispatches. Errors are reported on `err` and mapped
/// to the process exit codes in errors.hpp.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aoaloc::app
