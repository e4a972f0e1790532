#include "aoaloc/app/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "aoaloc/app/errors.hpp"
#include "aoaloc/app/eval.hpp"
#include "aoaloc/app/pipeline.hpp"
#include "aoaloc/app/wav.hpp"

namespace aoaloc::app {
namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

MultichannelRecording read_array_wav(const fs::path& path, const MicArray& array) {
  MultichannelRecording rec = read_wav(path);
  if (rec.num_channels() != static_cast<std::size_t>(array.num_elements())) {
    throw InvalidArgument(path.string() + ": expected " + std::to_string(array.num_elements()) +
                          " channels, got " + std::to_string(rec.num_channels()));
  }
  return rec;
}

void write_spectrum_csv(const fs::path& path, const AoaSpectrum& spectrum) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "angle_deg,score\n";
  for (std::size_t k = 0; k < spectrum.angles_deg.size(); ++k) {
    out << format_double(spectrum.angles_deg[k]) << ',' << format_double(spectrum.scores[k]) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

int cmd_simulate(const fs::path& scene_path, const fs::path& out_dir, std::ostream& out) {
  const Scene scene = scene_from_json(load_json(scene_path), scene_path.parent_path());
  ensure_dir(out_dir);
  const Simulation sim = synthesize(scene);

  Manifest manifest;
  manifest.model = scene.model;
  manifest.ground_truth = "ground_truth.json";
  for (std::size_t a = 0; a < scene.arrays.size(); ++a) {
    const fs::path wav = scene.arrays[a].id() + ".wav";
    write_wav(out_dir / wav, sim.recordings[a]);
    manifest.entries.push_back({scene.arrays[a], wav, std::nullopt, 1.0});
    out << "wrote " << (out_dir / wav).string() << " (" << sim.recordings[a].num_channels()
        << " channels, " << sim.recordings[a].length() << " samples)\n";
  }
  save_json(out_dir / "ground_truth.json", ground_truth_to_json(sim.truth));
  save_json(out_dir / "manifest.json", manifest_to_json(manifest));
  out << "wrote " << (out_dir / "manifest.json").string() << '\n';
  return kExitOk;
}

int cmd_aoa(const AoaCommand& command, const PipelineConfig& config, const fs::path& out_dir,
            std::ostream& out) {
  config.validate();
  const MultichannelRecording rec = read_array_wav(command.wav, command.array);
  const PropagationModel model{command.speed_of_sound, rec.sample_rate};
  const std::string method(to_string(config.method));
  const fs::path csv = command.spectrum_csv.value_or(
      out_dir / (command.array.id() + "_" + (config.method == AoaMethod::GccPlus ? "gccplus" : method) +
                 "_spectrum.csv"));
  if (!command.spectrum_csv) ensure_dir(out_dir);

  AoaResult result;
  try {
    result = run_aoa(rec, command.array, model, config.method, config);
  } catch (const AmbiguousEstimateError& e) {
    write_spectrum_csv(csv, e.spectrum());
    throw;
  }
  for (const auto& w : result.warnings) out << "warning: " << w << '\n';
  out << "array " << command.array.id() << " method " << method << '\n';
  out << "azimuth_deg " << fixed(rad2deg(result.estimate.azimuth)) << '\n';
  out << "confidence " << fixed(result.estimate.confidence) << '\n';
  if (result.spectrum.ambiguous) out << "warning: spectrum has no strict maximum\n";
  write_spectrum_csv(csv, result.spectrum);
  out << "spectrum " << csv.string() << '\n';
  return kExitOk;
}

int cmd_localize(const fs::path& manifest_path, const PipelineConfig& config, const fs::path& out_dir,
                 std::ostream& out, std::ostream& err) {
  config.validate();
  const Manifest manifest = manifest_from_json(load_json(manifest_path), manifest_path.parent_path());
  if (manifest.entries.size() < 2) {
    throw ConfigError("manifest.arrays", "localization needs at least two arrays, got " +
                                             std::to_string(manifest.entries.size()));
  }

  struct Bearing {
    std::string id;
    double azimuth_rad;
    double confidence;
  };
  std::vector<Bearing> bearings;
  std::vector<BearingLine> lines;
  for (const auto& entry : manifest.entries) {
    double azimuth = 0.0;
    double confidence = entry.confidence;
    if (entry.azimuth_deg) {
      azimuth = wrap_two_pi(deg2rad(*entry.azimuth_deg));
    } else {
      const MultichannelRecording rec = read_array_wav(entry.wav, entry.array);
      const PropagationModel model{manifest.model.speed_of_sound, rec.sample_rate};
      try {
        const AoaResult r = run_aoa(rec, entry.array, model, config.method, config);
        azimuth = r.estimate.azimuth;
        confidence = r.estimate.confidence;
      } catch (const EstimationError& e) {
        err << "warning: array " << entry.array.id() << " dropped: " << e.what() << '\n';
        continue;
      } catch (const NoSignalError& e) {
        err << "warning: array " << entry.array.id() << " dropped: " << e.what() << '\n';
        continue;
      }
    }
    bearings.push_back({entry.array.id(), azimuth, confidence});
    lines.push_back(make_bearing(entry.array, azimuth, confidence, config));
  }
  if (lines.size() < 2) {
    throw UnlocalizableError("only " + std::to_string(lines.size()) +
                             " usable bearing(s); at least two are needed");
  }

  const LocalizationResult result = run_solver(lines, config.solver, config);
  if (result.condition_flag) {
    throw UnlocalizableError("bearing lines are nearly parallel; the intersection is ill-conditioned");
  }

  std::optional<double> error_m;
  if (!manifest.ground_truth.empty() && fs::exists(manifest.ground_truth)) {
    const json truth = load_json(manifest.ground_truth);
    if (truth.contains("source_m")) {
      const Point2 source(truth["source_m"][0].get<double>(), truth["source_m"][1].get<double>());
      error_m = (result.position - source).norm();
    }
  }

  out << "position_m " << fixed(result.position.x()) << ' ' << fixed(result.position.y()) << '\n';
  out << "solver " << to_string(result.method) << " method " << to_string(config.method)
      << " iterations " << result.iterations << '\n';
  std::vector<bool> inlier(lines.size(), false);
  for (const auto i : result.inliers) inlier[i] = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out << "bearing " << bearings[i].id << " azimuth_deg " << fixed(rad2deg(bearings[i].azimuth_rad))
        << " weight " << fixed(result.weights[i]) << " residual_m " << fixed(result.residuals[i], 6)
        << (inlier[i] ? "" : " outlier") << (result.behind_anchor[i] ? " behind-anchor" : "") << '\n';
  }
  if (error_m) out << "error_m " << fixed(*error_m) << '\n';

  ensure_dir(out_dir);
  const fs::path csv = out_dir / "localization.csv";
  std::ofstream f(csv, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + csv.string() + "' for writing");
  f << "array_id,azimuth_deg,confidence,weight,residual_m,inlier,behind_anchor,x_m,y_m,solver,iterations\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    f << bearings[i].id << ',' << format_double(rad2deg(bearings[i].azimuth_rad)) << ','
      << format_double(bearings[i].confidence) << ',' << format_double(result.weights[i]) << ','
      << format_double(result.residuals[i]) << ',' << (inlier[i] ? 1 : 0) << ','
      << (result.behind_anchor[i] ? 1 : 0) << ',' << format_double(result.position.x()) << ','
      << format_double(result.position.y()) << ',' << to_string(result.method) << ','
      << result.iterations << '\n';
  }
  if (!f) throw IoError("failed writing '" + csv.string() + "'");
  out << "result " << csv.string() << '\n';
  return kExitOk;
}

int cmd_eval(const EvalCommand& command, const PipelineConfig& config, const fs::path& out_dir,
             std::ostream& out) {
  if (command.n_trials < 1) throw ConfigError("trials", "must be >= 1");
  EvalSetup setup = default_eval_setup();
  setup.n_trials = command.n_trials;
  if (command.bounds) setup.bounds = *command.bounds;
  setup.base.snr_db = command.snr_db;
  setup.echoes.count = command.echoes;
  setup.echoes.gain = command.echo_gain;
  setup.config = config;
  setup.threads = command.threads;
  ensure_dir(out_dir);

  const EvalResult result = run_eval(setup);
  const EvalSummary summary = summarize(result);
  write_aoa_trials_csv(out_dir / "aoa_trials.csv", result.aoa);
  write_loc_trials_csv(out_dir / "loc_trials.csv", result.loc);
  write_summary_csv(out_dir / "summary.csv", summary);
  out << format_summary(summary);
  out << "wrote " << (out_dir / "summary.csv").string() << ", aoa_trials.csv, loc_trials.csv\n";
  return kExitOk;
}

namespace {

struct ConfigFlags {
  std::optional<std::string> config_file;
  std::optional<double> band_low_hz, band_high_hz, grid_step_deg, ransac_threshold_m, irls_tol_m;
  std::optional<int> upsample_factor, num_windows, ransac_iterations, irls_max_iter, music_num_bins;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method, solver;
  std::optional<bool> confidence_weights;
  bool strict_paper_mode = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON pipeline configuration");
    app->add_option("--band-low-hz", band_low_hz);
    app->add_option("--band-high-hz", band_high_hz);
    app->add_option("--upsample-factor", upsample_factor);
    app->add_option("--num-windows", num_windows);
    app->add_option("--grid-step-deg", grid_step_deg);
    app->add_option("--method", method, "gcc+ | gcc-phat | music");
    app->add_option("--solver", solver, "mle | ransac | irls");
    app->add_option("--ransac-threshold-m", ransac_threshold_m);
    app->add_option("--ransac-iterations", ransac_iterations);
    app->add_option("--irls-max-iter", irls_max_iter);
    app->add_option("--irls-tol-m", irls_tol_m);
    app->add_option("--music-num-bins", music_num_bins);
    app->add_option("--seed", seed);
    app->add_option("--confidence-weights", confidence_weights, "true | false");
    app->add_flag("--strict-paper-mode", strict_paper_mode,
                  "uniform weights and a single analysis window");
  }

  PipelineConfig build() const {
    PipelineConfig c = config_file ? config_from_json(load_json(*config_file)) : PipelineConfig{};
    if (band_low_hz) c.band.low_hz = *band_low_hz;
    if (band_high_hz) c.band.high_hz = *band_high_hz;
    if (upsample_factor) c.upsample_factor = *upsample_factor;
    if (num_windows) c.num_windows = *num_windows;
    if (grid_step_deg) c.grid_step_deg = *grid_step_deg;
    if (ransac_threshold_m) c.ransac_threshold_m = *ransac_threshold_m;
    if (ransac_iterations) c.ransac_iterations = *ransac_iterations;
    if (irls_max_iter) c.irls_max_iter = *irls_max_iter;
    if (irls_tol_m) c.irls_tol_m = *irls_tol_m;
    if (music_num_bins) c.music_num_bins = *music_num_bins;
    if (seed) c.seed = *seed;
    if (confidence_weights) c.confidence_weights = *confidence_weights;
    if (strict_paper_mode) c.strict_paper_mode = true;
    try {
      if (method) c.method = parse_aoa_method(*method);
    } catch (const InvalidArgument& e) {
      throw ConfigError("method", e.what());
    }
    try {
      if (solver) c.solver = parse_solver(*solver);
    } catch (const InvalidArgument& e) {
      throw ConfigError("solver", e.what());
    }
    c.validate();
    return c;
  }
};

fs::path resolve_out_dir(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return ".";
}

MicArray parse_array_spec(const std::string& spec) {
  const json j = !spec.empty() && spec.front() == '{' ? json::parse(spec, nullptr, false) : load_json(spec);
  if (j.is_discarded()) throw ConfigError("array", "invalid inline JSON");
  return array_from_json(j, "array");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Angle-of-arrival estimation and bearing triangulation for hexagonal microphone arrays",
               "aoaloc"};
  app.require_subcommand(1);

  ConfigFlags flags;
  std::optional<std::string> out_dir;

  auto* simulate = app.add_subcommand("simulate", "synthesize per-array WAV files from a scene JSON");
  std::string scene_path;
  simulate->add_option("scene", scene_path, "scene JSON")->required();
  simulate->add_option("-o,--out-dir", out_dir);

  auto* aoa = app.add_subcommand("aoa", "estimate the azimuth seen by one array");
  AoaCommand aoa_cmd;
  std::string wav_path;
  std::optional<std::string> array_spec, array_id, spectrum_csv;
  std::optional<std::vector<double>> center;
  std::optional<double> orientation, side;
  aoa->add_option("wav", wav_path, "6-channel WAV recording")->required();
  aoa->add_option("--array", array_spec, "array JSON (inline or file)");
  aoa->add_option("--id", array_id);
  aoa->add_option("--center-m", center, "array center x y")->expected(2);
  aoa->add_option("--orientation-rad", orientation);
  aoa->add_option("--side-length-m", side);
  aoa->add_option("--speed-of-sound-mps", aoa_cmd.speed_of_sound);
  aoa->add_option("--spectrum-csv", spectrum_csv);
  aoa->add_option("-o,--out-dir", out_dir);
  flags.attach(aoa);

  auto* localize = app.add_subcommand("localize", "triangulate the source from a manifest");
  std::string manifest_path;
  localize->add_option("manifest", manifest_path, "manifest JSON")->required();
  localize->add_option("-o,--out-dir", out_dir);
  flags.attach(localize);

  auto* eval = app.add_subcommand("eval", "simulated accuracy sweep over every method and solver");
  EvalCommand eval_cmd;
  std::optional<std::vector<double>> bounds;
  eval->add_option("-n,--trials", eval_cmd.n_trials)->check(CLI::PositiveNumber);
  eval->add_option("--bounds", bounds, "xmin ymin xmax ymax")->expected(4);
  eval->add_option("--snr-db", eval_cmd.snr_db);
  eval->add_option("--echoes", eval_cmd.echoes)->check(CLI::NonNegativeNumber);
  eval->add_option("--echo-gain", eval_cmd.echo_gain);
  eval->add_option("--threads", eval_cmd.threads);
  eval->add_option("-o,--out-dir", out_dir);
  flags.attach(eval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const fs::path dir = resolve_out_dir(out_dir);
    if (simulate->parsed()) return cmd_simulate(scene_path, dir, out);

    const PipelineConfig config = flags.build();
    if (aoa->parsed()) {
      if (array_spec) {
        aoa_cmd.array = parse_array_spec(*array_spec);
      } else {
        aoa_cmd.array = build_hex_array(array_id.value_or("array"),
                                        center ? Point2((*center)[0], (*center)[1]) : Point2::Zero(),
                                        orientation.value_or(0.0), side.value_or(kDefaultSideLength));
      }
      aoa_cmd.wav = wav_path;
      if (spectrum_csv) aoa_cmd.spectrum_csv = fs::path(*spectrum_csv);
      return cmd_aoa(aoa_cmd, config, dir, out);
    }
    if (localize->parsed()) return cmd_localize(manifest_path, config, dir, out, err);
    if (eval->parsed()) {
      if (bounds) eval_cmd.bounds = Rect{{(*bounds)[0], (*bounds)[1]}, {(*bounds)[2], (*bounds)[3]}};
      return cmd_eval(eval_cmd, config, dir, out);
    }
  } catch (const ConfigError& e) {
    err << "aoaloc: config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "aoaloc: invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "aoaloc: unsupported input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnlocalizableError& e) {
    err << "aoaloc: unlocalizable: " << e.what() << '\n';
    return kExitUnlocalizable;
  } catch (const IoError& e) {
    err << "aoaloc: i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "aoaloc: i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "aoaloc: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace aoaloc::app
