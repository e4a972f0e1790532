#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aoaloc/aoa.hpp"
#include "aoaloc/localize.hpp"
#include "aoaloc/sim.hpp"

namespace aoaloc::app {

using nlohmann::json;

/// Every tunable of the pipeline. CLI flags are the kebab-case field names.
struct PipelineConfig {
  Band band = kSpeechBand;
  int upsample_factor = kDefaultUpsampleFactor;
  int num_windows = 2;
  double grid_step_deg = kDefaultGridStepDeg;
  AoaMethod method = AoaMethod::GccPlus;
  Solver solver = Solver::Irls;
  double ransac_threshold_m = 0.5;
  int ransac_iterations = 100;
  int irls_max_iter = 50;
  double irls_tol_m = 1e-6;
  int music_num_bins = 32;
  std::uint64_t seed = 0;
  /// Weight delays by correlation peak and bearings by AoA confidence.
  bool confidence_weights = true;
  /// Uniform weights and a single window, nothing else.
  bool strict_paper_mode = false;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// The configuration actually run: strict_paper_mode forces
/// confidence_weights = false and num_windows = 1.
PipelineConfig effective(const PipelineConfig& config);

GccPipelineOptions gcc_options(const PipelineConfig& config, AoaMethod method);
MusicOptions music_options(const PipelineConfig& config);
RansacOptions ransac_options(const PipelineConfig& config);
IrlsOptions irls_options(const PipelineConfig& config);

/// Unknown keys are rejected; missing keys keep their defaults.
PipelineConfig config_from_json(const json& j);
json to_json(const PipelineConfig& config);

/// Scene description with unit-suffixed keys (center_m, orientation_rad...).
/// Relative file-source paths resolve against `base_dir`.
Scene scene_from_json(const json& j, const std::filesystem::path& base_dir = {});
json scene_to_json(const Scene& scene);

json array_to_json(const MicArray& array);
/// Also tolerates the manifest-only keys wav, azimuth_deg and confidence.
MicArray array_from_json(const json& j, const std::string& key);

json ground_truth_to_json(const GroundTruth& truth);

/// One array entry of a localization manifest: either a recording to run
/// AoA on, or an azimuth already estimated on the device.
struct ManifestEntry {
  MicArray array;
  std::filesystem::path wav;          // empty when azimuth_deg is given
  std::optional<double> azimuth_deg;  // global frame
  double confidence = 1.0;
};

struct Manifest {
  PropagationModel model;
  std::vector<ManifestEntry> entries;
  std::filesystem::path ground_truth;  // optional
};

Manifest manifest_from_json(const json& j, const std::filesystem::path& base_dir);
json manifest_to_json(const Manifest& manifest);

/// Parses a JSON file, mapping open failures to IoError and syntax errors to
/// ConfigError.
json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const json& j);

}  // namespace aoaloc::app
