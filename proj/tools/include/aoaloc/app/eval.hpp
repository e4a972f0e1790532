#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "aoaloc/app/config.hpp"

namespace aoaloc::app {

/// One array's AoA outcome within one trial.
struct AoaTrial {
  int trial = 0;
  AoaMethod method = AoaMethod::GccPlus;
  std::string array_id;
  double true_deg = 0.0;
  double estimate_deg = 0.0;  // NaN when failed
  double error_deg = 0.0;     // NaN when failed
  bool ok = true;
};

/// One method x solver localization outcome within one trial.
struct LocTrial {
  int trial = 0;
  AoaMethod method = AoaMethod::GccPlus;
  Solver solver = Solver::Mle;
  Point2 truth = Point2::Zero();
  Point2 estimate = Point2::Zero();  // NaN when failed
  double error_m = 0.0;              // NaN when failed
  bool ok = true;
};

struct EvalResult {
  std::vector<AoaTrial> aoa;
  std::vector<LocTrial> loc;
};

struct ErrorStats {
  std::size_t count = 0;     // successful trials contributing
  std::size_t failures = 0;
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;

  friend bool operator==(const ErrorStats&, const ErrorStats&) = default;
};

/// metric is "aoa_deg" (solver empty) or "loc_m".
struct SummaryRow {
  std::string metric;
  std::string method;
  std::string solver;
  ErrorStats stats;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct EvalSummary {
  int trial_count = 0;
  std::vector<SummaryRow> rows;

  const SummaryRow* find(const std::string& metric, const std::string& method,
                         const std::string& solver = {}) const;
  friend bool operator==(const EvalSummary&, const EvalSummary&) = default;
};

/// Linear interpolation between closest ranks, q in [0, 1]. Empty input gives NaN.
double percentile(std::vector<double> values, double q);
ErrorStats error_stats(const std::vector<double>& errors, std::size_t failures);

struct EvalSetup {
  int n_trials = 50;
  Rect bounds;
  Scene base;  // arrays, SNR, model and duration shared by every trial
  EchoSampling echoes;
  PipelineConfig config;
  std::vector<AoaMethod> methods{AoaMethod::GccPlus, AoaMethod::GccPhat, AoaMethod::Music};
  std::vector<Solver> solvers{Solver::Mle, Solver::Ransac, Solver::Irls};
  unsigned threads = 0;  // 0 means hardware concurrency
};

/// Three arrays on the walls of a 6 m x 5 m room, SNR 20 dB, sources anywhere
/// inside the room.
EvalSetup default_eval_setup();

/// Trials run concurrently; rows come back ordered by trial index, then
/// method, then array or solver. Failed estimates are recorded, not thrown.
EvalResult run_eval(const EvalSetup& setup);

/// trial_count is the number of distinct trial indices present.
EvalSummary summarize(const EvalResult& result);
std::string format_summary(const EvalSummary& summary);

void write_aoa_trials_csv(const std::filesystem::path& path, const std::vector<AoaTrial>& rows);
void write_loc_trials_csv(const std::filesystem::path& path, const std::vector<LocTrial>& rows);
void write_summary_csv(const std::filesystem::path& path, const EvalSummary& summary);
std::vector<AoaTrial> read_aoa_trials_csv(const std::filesystem::path& path);
std::vector<LocTrial> read_loc_trials_csv(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace aoaloc::app
