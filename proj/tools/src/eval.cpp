#include "aoaloc/app/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "aoaloc/app/errors.hpp"
#include "aoaloc/app/pipeline.hpp"

namespace aoaloc::app {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TrialOutput {
  std::vector<AoaTrial> aoa;
  std::vector<LocTrial> loc;
};

// Mixes the trial index into the RANSAC seed so trials draw independent
// hypotheses but stay reproducible.
std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrialOutput run_trial(const EvalSetup& setup, const Scene& scene, int trial) {
  TrialOutput out;
  const Simulation sim = synthesize(scene);
  PipelineConfig config = setup.config;
  config.seed = trial_seed(setup.config.seed, trial);

  for (const AoaMethod method : setup.methods) {
    std::vector<BearingLine> lines;
    for (std::size_t a = 0; a < scene.arrays.size(); ++a) {
      AoaTrial row;
      row.trial = trial;
      row.method = method;
      row.array_id = scene.arrays[a].id();
      row.true_deg = sim.truth.arrays[a].azimuth_deg;
      try {
        const AoaResult r = run_aoa(sim.recordings[a], scene.arrays[a], scene.model, method, config);
        row.estimate_deg = rad2deg(r.estimate.azimuth);
        row.error_deg = rad2deg(angular_distance(r.estimate.azimuth, deg2rad(row.true_deg)));
        lines.push_back(make_bearing(scene.arrays[a], r.estimate.azimuth, r.estimate.confidence, config));
      } catch (const std::runtime_error&) {
        row.ok = false;
        row.estimate_deg = kNaN;
        row.error_deg = kNaN;
      }
      out.aoa.push_back(row);
    }
    for (const Solver solver : setup.solvers) {
      LocTrial row;
      row.trial = trial;
      row.method = method;
      row.solver = solver;
      row.truth = scene.source;
      try {
        if (lines.size() < 2) throw UnlocalizableError("fewer than two bearings");
        const LocalizationResult r = run_solver(lines, solver, config);
        row.estimate = r.position;
        row.error_m = (r.position - scene.source).norm();
      } catch (const std::runtime_error&) {
        row.ok = false;
        row.estimate = Point2(kNaN, kNaN);
        row.error_m = kNaN;
      }
      out.loc.push_back(row);
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw FormatError("bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw FormatError("bad integer '" + s + "'");
  return v;
}

bool parse_status(const std::string& s) {
  if (s == "ok") return true;
  if (s == "failed") return false;
  throw FormatError("bad status '" + s + "'");
}

template <class Fn>
void read_rows(const std::filesystem::path& path, const std::string& header, std::size_t width, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw FormatError(path.string() + ": unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != width) throw FormatError(path.string() + ": wrong field count");
    fn(fields);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

const char* kAoaHeader = "trial,method,array_id,true_deg,estimate_deg,error_deg,status";
const char* kLocHeader =
    "trial,method,solver,true_x_m,true_y_m,estimate_x_m,estimate_y_m,error_m,status";

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

ErrorStats error_stats(const std::vector<double>& errors, std::size_t failures) {
  ErrorStats s;
  s.count = errors.size();
  s.failures = failures;
  if (errors.empty()) {
    s.mean = s.median = s.p90 = kNaN;
    return s;
  }
  s.mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
  s.median = percentile(errors, 0.5);
  s.p90 = percentile(errors, 0.9);
  return s;
}

const SummaryRow* EvalSummary::find(const std::string& metric, const std::string& method,
                                    const std::string& solver) const {
  for (const auto& r : rows) {
    if (r.metric == metric && r.method == method && r.solver == solver) return &r;
  }
  return nullptr;
}

EvalSetup default_eval_setup() {
  EvalSetup s;
  s.base.arrays = {build_hex_array("A", {0.0, 0.0}, 0.3), build_hex_array("B", {6.0, 0.0}, 2.0),
                   build_hex_array("C", {3.0, 5.0}, 4.0)};
  s.base.snr_db = 20.0;
  s.bounds = Rect{{0.0, 0.0}, {6.0, 5.0}};
  return s;
}

EvalResult run_eval(const EvalSetup& setup) {
  if (setup.n_trials < 1) throw InvalidArgument("n_trials must be >= 1");
  setup.config.validate();
  const std::vector<Scene> scenes =
      sample_scenarios(setup.base, setup.n_trials, setup.bounds, setup.config.seed, setup.echoes);

  std::vector<TrialOutput> outputs(scenes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenes.size(); i = next++) {
      outputs[i] = run_trial(setup, scenes[i], static_cast<int>(i));
    }
  };
  unsigned n_threads = setup.threads ? setup.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(scenes.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  EvalResult result;
  for (auto& o : outputs) {
    result.aoa.insert(result.aoa.end(), o.aoa.begin(), o.aoa.end());
    result.loc.insert(result.loc.end(), o.loc.begin(), o.loc.end());
  }
  return result;
}

EvalSummary summarize(const EvalResult& result) {
  EvalSummary summary;
  std::set<int> trials;
  std::vector<std::string> methods;
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> aoa;
  for (const auto& r : result.aoa) {
    trials.insert(r.trial);
    const std::string m(to_string(r.method));
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
    auto& [errors, failures] = aoa[m];
    if (r.ok) errors.push_back(r.error_deg); else ++failures;
  }
  std::vector<std::pair<std::string, std::string>> combos;
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::size_t>> loc;
  for (const auto& r : result.loc) {
    trials.insert(r.trial);
    const std::pair<std::string, std::string> key{std::string(to_string(r.method)), std::string(to_string(r.solver))};
    if (std::find(combos.begin(), combos.end(), key) == combos.end()) combos.push_back(key);
    auto& [errors, failures] = loc[key];
    if (r.ok) errors.push_back(r.error_m); else ++failures;
  }
  summary.trial_count = static_cast<int>(trials.size());
  for (const auto& m : methods) {
    summary.rows.push_back({"aoa_deg", m, "", error_stats(aoa[m].first, aoa[m].second)});
  }
  for (const auto& key : combos) {
    summary.rows.push_back({"loc_m", key.first, key.second, error_stats(loc[key].first, loc[key].second)});
  }
  return summary;
}

std::string format_summary(const EvalSummary& summary) {
  std::ostringstream os;
  char line[160];
  os << "trials: " << summary.trial_count << '\n';
  std::snprintf(line, sizeof line, "%-8s %-9s %-7s %6s %6s %10s %10s %10s\n", "metric", "method",
                "solver", "n", "failed", "mean", "median", "p90");
  os << line;
  for (const auto& r : summary.rows) {
    std::snprintf(line, sizeof line, "%-8s %-9s %-7s %6zu %6zu %10.4f %10.4f %10.4f\n", r.metric.c_str(),
                  r.method.c_str(), r.solver.empty() ? "-" : r.solver.c_str(), r.stats.count,
                  r.stats.failures, r.stats.mean, r.stats.median, r.stats.p90);
    os << line;
  }
  return os.str();
}

void write_aoa_trials_csv(const std::filesystem::path& path, const std::vector<AoaTrial>& rows) {
  auto out = open_out(path);
  out << kAoaHeader << '\n';
  for (const auto& r : rows) {
    out << r.trial << ',' << to_string(r.method) << ',' << r.array_id << ',' << format_double(r.true_deg)
        << ',' << format_double(r.estimate_deg) << ',' << format_double(r.error_deg) << ','
        << (r.ok ? "ok" : "failed") << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_loc_trials_csv(const std::filesystem::path& path, const std::vector<LocTrial>& rows) {
  auto out = open_out(path);
  out << kLocHeader << '\n';
  for (const auto& r : rows) {
    out << r.trial << ',' << to_string(r.method) << ',' << to_string(r.solver) << ','
        << format_double(r.truth.x()) << ',' << format_double(r.truth.y()) << ','
        << format_double(r.estimate.x()) << ',' << format_double(r.estimate.y()) << ','
        << format_double(r.error_m) << ',' << (r.ok ? "ok" : "failed") << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_summary_csv(const std::filesystem::path& path, const EvalSummary& summary) {
  auto out = open_out(path);
  out << "metric,method,solver,trials,count,failures,mean,median,p90\n";
  for (const auto& r : summary.rows) {
    out << r.metric << ',' << r.method << ',' << r.solver << ',' << summary.trial_count << ','
        << r.stats.count << ',' << r.stats.failures << ',' << format_double(r.stats.mean) << ','
        << format_double(r.stats.median) << ',' << format_double(r.stats.p90) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<AoaTrial> read_aoa_trials_csv(const std::filesystem::path& path) {
  std::vector<AoaTrial> rows;
  read_rows(path, kAoaHeader, 7, [&](const std::vector<std::string>& f) {
    AoaTrial r;
    r.trial = parse_int(f[0]);
    r.method = parse_aoa_method(f[1]);
    r.array_id = f[2];
    r.true_deg = parse_double(f[3]);
    r.estimate_deg = parse_double(f[4]);
    r.error_deg = parse_double(f[5]);
    r.ok = parse_status(f[6]);
    rows.push_back(std::move(r));
  });
  return rows;
}

std::vector<LocTrial> read_loc_trials_csv(const std::filesystem::path& path) {
  std::vector<LocTrial> rows;
  read_rows(path, kLocHeader, 9, [&](const std::vector<std::string>& f) {
    LocTrial r;
    r.trial = parse_int(f[0]);
    r.method = parse_aoa_method(f[1]);
    r.solver = parse_solver(f[2]);
    r.truth = Point2(parse_double(f[3]), parse_double(f[4]));
    r.estimate = Point2(parse_double(f[5]), parse_double(f[6]));
    r.error_m = parse_double(f[7]);
    r.ok = parse_status(f[8]);
    rows.push_back(std::move(r));
  });
  return rows;
}

}  // namespace aoaloc::app
