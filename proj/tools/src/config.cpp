#include "aoaloc/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "aoaloc/app/errors.hpp"
#include "aoaloc/app/wav.hpp"

namespace aoaloc::app {
namespace {

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError(join(where, key), "unknown key");
  }
}

const json& require(const json& j, const std::string& where, const std::string& key) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  if (!j.contains(key)) throw ConfigError(join(where, key), "missing required key");
  return j.at(key);
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(key, "must be finite");
  return d;
}

int integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<int>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

Point2 point(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(key, "expected [x, y] in meters");
  }
  const Point2 p(v[0].get<double>(), v[1].get<double>());
  if (!p.allFinite()) throw ConfigError(key, "coordinates must be finite");
  return p;
}

template <class T>
void read_opt(const json& j, const std::string& where, const char* key, T& out) {
  if (!j.contains(key)) return;
  const std::string path = join(where, key);
  const json& v = j.at(key);
  if constexpr (std::is_same_v<T, double>) {
    out = number(v, path);
  } else if constexpr (std::is_same_v<T, int>) {
    out = integer(v, path);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(path, "expected a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(band.low_hz >= 0.0) || !(band.high_hz > band.low_hz)) {
    throw ConfigError("band_low_hz", "band must satisfy 0 <= low < high");
  }
  if (upsample_factor < 1) throw ConfigError("upsample_factor", "must be >= 1");
  if (num_windows < 1) throw ConfigError("num_windows", "must be >= 1");
  if (!(grid_step_deg > 0.0) || grid_step_deg > 5.0) {
    throw ConfigError("grid_step_deg", "must lie in (0, 5]");
  }
  if (!(ransac_threshold_m > 0.0)) throw ConfigError("ransac_threshold_m", "must be positive");
  if (ransac_iterations < 1) throw ConfigError("ransac_iterations", "must be >= 1");
  if (irls_max_iter < 1) throw ConfigError("irls_max_iter", "must be >= 1");
  if (!(irls_tol_m > 0.0)) throw ConfigError("irls_tol_m", "must be positive");
  if (music_num_bins < 1) throw ConfigError("music_num_bins", "must be >= 1");
}

PipelineConfig effective(const PipelineConfig& config) {
  PipelineConfig out = config;
  if (out.strict_paper_mode) {
    out.confidence_weights = false;
    out.num_windows = 1;
  }
  return out;
}

GccPipelineOptions gcc_options(const PipelineConfig& c, AoaMethod method) {
  const PipelineConfig e = effective(c);
  if (method == AoaMethod::GccPhat) return gcc_phat_baseline_options(e.grid_step_deg, e.band);
  GccPipelineOptions o;
  o.band = e.band;
  o.upsample_factor = e.upsample_factor;
  o.num_windows = e.num_windows;
  o.matcher.grid_step_deg = e.grid_step_deg;
  o.matcher.confidence_weights = e.confidence_weights;
  return o;
}

MusicOptions music_options(const PipelineConfig& c) {
  MusicOptions o;
  o.band = c.band;
  o.num_bins = c.music_num_bins;
  o.grid_step_deg = c.grid_step_deg;
  return o;
}

RansacOptions ransac_options(const PipelineConfig& c) {
  RansacOptions o;
  o.threshold = c.ransac_threshold_m;
  o.iterations = c.ransac_iterations;
  o.seed = c.seed;
  return o;
}

IrlsOptions irls_options(const PipelineConfig& c) {
  IrlsOptions o;
  o.max_iter = c.irls_max_iter;
  o.tol = c.irls_tol_m;
  return o;
}

PipelineConfig config_from_json(const json& j) {
  const std::string where = "config";
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  reject_unknown(j, where,
                 {"band_low_hz", "band_high_hz", "upsample_factor", "num_windows",
                  "grid_step_deg", "method", "solver", "ransac_threshold_m", "ransac_iterations",
                  "irls_max_iter", "irls_tol_m", "music_num_bins", "seed", "confidence_weights",
                  "strict_paper_mode"});
  PipelineConfig c;
  read_opt(j, where, "band_low_hz", c.band.low_hz);
  read_opt(j, where, "band_high_hz", c.band.high_hz);
  read_opt(j, where, "upsample_factor", c.upsample_factor);
  read_opt(j, where, "num_windows", c.num_windows);
  read_opt(j, where, "grid_step_deg", c.grid_step_deg);
  read_opt(j, where, "ransac_threshold_m", c.ransac_threshold_m);
  read_opt(j, where, "ransac_iterations", c.ransac_iterations);
  read_opt(j, where, "irls_max_iter", c.irls_max_iter);
  read_opt(j, where, "irls_tol_m", c.irls_tol_m);
  read_opt(j, where, "music_num_bins", c.music_num_bins);
  read_opt(j, where, "seed", c.seed);
  read_opt(j, where, "confidence_weights", c.confidence_weights);
  read_opt(j, where, "strict_paper_mode", c.strict_paper_mode);
  try {
    if (j.contains("method")) c.method = parse_aoa_method(text(j.at("method"), "config.method"));
  } catch (const InvalidArgument& e) {
    throw ConfigError("config.method", e.what());
  }
  try {
    if (j.contains("solver")) c.solver = parse_solver(text(j.at("solver"), "config.solver"));
  } catch (const InvalidArgument& e) {
    throw ConfigError("config.solver", e.what());
  }
  c.validate();
  return c;
}

json to_json(const PipelineConfig& c) {
  return json{{"band_low_hz", c.band.low_hz},
              {"band_high_hz", c.band.high_hz},
              {"upsample_factor", c.upsample_factor},
              {"num_windows", c.num_windows},
              {"grid_step_deg", c.grid_step_deg},
              {"method", std::string(to_string(c.method))},
              {"solver", std::string(to_string(c.solver))},
              {"ransac_threshold_m", c.ransac_threshold_m},
              {"ransac_iterations", c.ransac_iterations},
              {"irls_max_iter", c.irls_max_iter},
              {"irls_tol_m", c.irls_tol_m},
              {"music_num_bins", c.music_num_bins},
              {"seed", c.seed},
              {"confidence_weights", c.confidence_weights},
              {"strict_paper_mode", c.strict_paper_mode}};
}

json array_to_json(const MicArray& a) {
  return json{{"id", a.id()},
              {"center_m", {a.center().x(), a.center().y()}},
              {"orientation_rad", a.orientation()},
              {"side_length_m", a.side_length()}};
}

MicArray array_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  reject_unknown(j, where,
                 {"id", "center_m", "orientation_rad", "side_length_m", "wav", "azimuth_deg", "confidence"});
  const std::string id = text(require(j, where, "id"), join(where, "id"));
  const Point2 center = point(require(j, where, "center_m"), join(where, "center_m"));
  double orientation = 0.0;
  double side = kDefaultSideLength;
  read_opt(j, where, "orientation_rad", orientation);
  read_opt(j, where, "side_length_m", side);
  if (!(side > 0.0)) throw ConfigError(join(where, "side_length_m"), "must be positive");
  return build_hex_array(id, center, orientation, side);
}

Scene scene_from_json(const json& j, const std::filesystem::path& base_dir) {
  const std::string where = "scene";
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  reject_unknown(j, where,
                 {"sample_rate_hz", "speed_of_sound_mps", "arrays", "source", "duration_s",
                  "snr_db", "echoes", "seed", "max_start_offset_s"});
  Scene s;
  read_opt(j, where, "sample_rate_hz", s.model.sample_rate);
  read_opt(j, where, "speed_of_sound_mps", s.model.speed_of_sound);
  if (!(s.model.sample_rate > 0.0)) throw ConfigError("scene.sample_rate_hz", "must be positive");
  if (!(s.model.speed_of_sound > 0.0)) throw ConfigError("scene.speed_of_sound_mps", "must be positive");

  const json& arrays = require(j, where, "arrays");
  if (!arrays.is_array() || arrays.empty()) throw ConfigError("scene.arrays", "expected a non-empty list");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < arrays.size(); ++i) {
    const std::string key = "scene.arrays[" + std::to_string(i) + "]";
    s.arrays.push_back(array_from_json(arrays[i], key));
    if (!ids.insert(s.arrays.back().id()).second) throw ConfigError(key + ".id", "duplicate array id");
  }

  const json& source = require(j, where, "source");
  s.source = point(require(source, "scene.source", "position_m"), "scene.source.position_m");
  if (source.contains("signal")) {
    const json& sig = source.at("signal");
    const std::string sw = "scene.source.signal";
    const std::string kind = text(require(sig, sw, "kind"), sw + ".kind");
    if (kind == "speech_like") {
      s.signal = SpeechLikeNoise{};
    } else if (kind == "chirp") {
      Chirp c;
      read_opt(sig, sw, "start_hz", c.start_hz);
      read_opt(sig, sw, "end_hz", c.end_hz);
      s.signal = c;
    } else if (kind == "tone") {
      Tone t;
      t.frequency_hz = number(require(sig, sw, "frequency_hz"), sw + ".frequency_hz");
      if (!(t.frequency_hz > 0.0) || t.frequency_hz >= s.model.sample_rate / 2.0) {
        throw ConfigError(sw + ".frequency_hz", "must lie in (0, sample_rate/2)");
      }
      s.signal = t;
    } else if (kind == "file") {
      std::filesystem::path p = text(require(sig, sw, "path"), sw + ".path");
      if (p.is_relative()) p = base_dir / p;
      const MultichannelRecording wav = read_wav(p);
      FileSource f;
      f.samples = wav.channels.front();
      f.sample_rate = wav.sample_rate;
      f.path = p.string();
      s.signal = std::move(f);
    } else {
      throw ConfigError(sw + ".kind", "expected speech_like, chirp, tone or file");
    }
  }

  read_opt(j, where, "duration_s", s.duration_s);
  if (!(s.duration_s > 0.0)) throw ConfigError("scene.duration_s", "must be positive");
  if (j.contains("snr_db") && !j.at("snr_db").is_null()) s.snr_db = number(j.at("snr_db"), "scene.snr_db");
  read_opt(j, where, "seed", s.seed);
  read_opt(j, where, "max_start_offset_s", s.max_start_offset_s);
  if (!(s.max_start_offset_s >= 0.0)) throw ConfigError("scene.max_start_offset_s", "must be >= 0");

  if (j.contains("echoes")) {
    const json& echoes = j.at("echoes");
    if (!echoes.is_array()) throw ConfigError("scene.echoes", "expected a list");
    for (std::size_t i = 0; i < echoes.size(); ++i) {
      const std::string ew = "scene.echoes[" + std::to_string(i) + "]";
      Echo e;
      e.delay_s = number(require(echoes[i], ew, "delay_s"), ew + ".delay_s");
      e.gain = number(require(echoes[i], ew, "gain"), ew + ".gain");
      read_opt(echoes[i], ew, "azimuth_offset_deg", e.azimuth_offset_deg);
      if (!(e.gain >= 0.0 && e.gain < 1.0)) throw ConfigError(ew + ".gain", "must lie in [0, 1)");
      if (!(e.delay_s >= 0.0)) throw ConfigError(ew + ".delay_s", "must be >= 0");
      s.echoes.push_back(e);
    }
  }

  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(where, e.what());
  }
  return s;
}

json scene_to_json(const Scene& s) {
  json arrays = json::array();
  for (const auto& a : s.arrays) arrays.push_back(array_to_json(a));
  json signal;
  if (std::holds_alternative<SpeechLikeNoise>(s.signal)) {
    signal = {{"kind", "speech_like"}};
  } else if (const auto* c = std::get_if<Chirp>(&s.signal)) {
    signal = {{"kind", "chirp"}, {"start_hz", c->start_hz}, {"end_hz", c->end_hz}};
  } else if (const auto* t = std::get_if<Tone>(&s.signal)) {
    signal = {{"kind", "tone"}, {"frequency_hz", t->frequency_hz}};
  } else if (const auto* f = std::get_if<FileSource>(&s.signal)) {
    signal = {{"kind", "file"}, {"path", f->path}};
  }
  json echoes = json::array();
  for (const auto& e : s.echoes) {
    echoes.push_back({{"delay_s", e.delay_s}, {"gain", e.gain}, {"azimuth_offset_deg", e.azimuth_offset_deg}});
  }
  return json{{"sample_rate_hz", s.model.sample_rate},
              {"speed_of_sound_mps", s.model.speed_of_sound},
              {"arrays", arrays},
              {"source", {{"position_m", {s.source.x(), s.source.y()}}, {"signal", signal}}},
              {"duration_s", s.duration_s},
              {"snr_db", std::isinf(s.snr_db) ? json(nullptr) : json(s.snr_db)},
              {"echoes", echoes},
              {"seed", s.seed},
              {"max_start_offset_s", s.max_start_offset_s}};
}

json ground_truth_to_json(const GroundTruth& truth) {
  json arrays = json::array();
  for (const auto& a : truth.arrays) {
    json pairs = json::array();
    for (std::size_t k = 0; k < a.pairs.size(); ++k) {
      pairs.push_back({{"pair", {a.pairs[k].first, a.pairs[k].second}}, {"delay_s", a.pair_delays_s[k]}});
    }
    arrays.push_back({{"id", a.array_id},
                      {"azimuth_deg", a.azimuth_deg},
                      {"range_m", a.range_m},
                      {"start_offset_s", a.start_offset_s},
                      {"pair_delays", pairs}});
  }
  return json{{"source_m", {truth.source.x(), truth.source.y()}}, {"arrays", arrays}};
}

Manifest manifest_from_json(const json& j, const std::filesystem::path& base_dir) {
  const std::string where = "manifest";
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  reject_unknown(j, where, {"sample_rate_hz", "speed_of_sound_mps", "arrays", "ground_truth"});
  Manifest m;
  read_opt(j, where, "sample_rate_hz", m.model.sample_rate);
  read_opt(j, where, "speed_of_sound_mps", m.model.speed_of_sound);
  if (!(m.model.sample_rate > 0.0)) throw ConfigError("manifest.sample_rate_hz", "must be positive");
  if (!(m.model.speed_of_sound > 0.0)) throw ConfigError("manifest.speed_of_sound_mps", "must be positive");
  if (j.contains("ground_truth")) {
    m.ground_truth = base_dir / text(j.at("ground_truth"), "manifest.ground_truth");
  }
  const json& arrays = require(j, where, "arrays");
  if (!arrays.is_array()) throw ConfigError("manifest.arrays", "expected a list");
  for (std::size_t i = 0; i < arrays.size(); ++i) {
    const std::string key = "manifest.arrays[" + std::to_string(i) + "]";
    ManifestEntry e{array_from_json(arrays[i], key), {}, std::nullopt, 1.0};
    if (arrays[i].contains("azimuth_deg")) {
      e.azimuth_deg = number(arrays[i].at("azimuth_deg"), key + ".azimuth_deg");
      read_opt(arrays[i], key, "confidence", e.confidence);
      if (!(e.confidence > 0.0)) throw ConfigError(key + ".confidence", "must be positive");
    } else if (arrays[i].contains("wav")) {
      std::filesystem::path p = text(arrays[i].at("wav"), key + ".wav");
      e.wav = p.is_relative() ? base_dir / p : p;
    } else {
      throw ConfigError(key + ".wav", "each array needs either wav or azimuth_deg");
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

json manifest_to_json(const Manifest& m) {
  json arrays = json::array();
  for (const auto& e : m.entries) {
    json a = array_to_json(e.array);
    if (e.azimuth_deg) {
      a["azimuth_deg"] = *e.azimuth_deg;
      a["confidence"] = e.confidence;
    } else {
      a["wav"] = e.wav.generic_string();
    }
    arrays.push_back(a);
  }
  json j{{"sample_rate_hz", m.model.sample_rate},
         {"speed_of_sound_mps", m.model.speed_of_sound},
         {"arrays", arrays}};
  if (!m.ground_truth.empty()) j["ground_truth"] = m.ground_truth.generic_string();
  return j;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.filename().string(), std::string("invalid JSON: ") + e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace aoaloc::app
