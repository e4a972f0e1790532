#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aoaloc/geometry.hpp"

namespace aoaloc {

/// Infinite line through an anchor along a bearing: anchor + t * direction.
struct BearingLine {
  Point2 anchor;
  Point2 direction;  // unit length
  double weight = 1.0;
  std::string array_id;

  static BearingLine from_azimuth(const Point2& anchor, double azimuth, double weight = 1.0,
                                  std::string array_id = {});

  /// Perpendicular distance from `p` to the line.
  double distance(const Point2& p) const;
  /// Signed position of p's projection along the line; negative means the
  /// point lies behind the anchor.
  double along(const Point2& p) const { return direction.dot(p - anchor); }
};

enum class Solver { Mle, Ransac, Irls };

std::string_view to_string(Solver solver);
Solver parse_solver(std::string_view name);

struct LocalizationResult {
  Point2 position = Point2::Zero();
  std::vector<double> residuals;  // per line, meters
  Solver method = Solver::Mle;
  std::vector<std::size_t> inliers;  // line indices (RANSAC); all lines otherwise
  std::vector<double> weights;       // final per-line weights
  int iterations = 0;
  bool condition_flag = false;       // normal matrix condition number > 1e6
  std::vector<bool> behind_anchor;   // solution projects to t < 0 on that line
};

inline constexpr double kConditionLimit = 1e6;
inline constexpr double kParallelTolerance = 1e-8;

/// Closed-form weighted least squares over perpendicular distances.
/// Throws UnlocalizableError for fewer than two lines or all-parallel lines.
LocalizationResult solve_mle(const std::vector<BearingLine>& lines);

struct RansacOptions {
  double threshold = 0.5;  // meters
  int iterations = 100;
  std::uint64_t seed = 0;
  double min_sin_angle = 1e-3;  // pairs closer to parallel are skipped
};

/// Hypothesize from random line pairs, keep the largest consensus set (ties
/// go to the lower summed inlier residual), then refit with solve_mle on the
/// inliers. Deterministic for a given seed.
LocalizationResult solve_ransac(const std::vector<BearingLine>& lines,
                                const RansacOptions& options = {});

struct IrlsOptions {
  int max_iter = 50;
  double tol = 1e-6;     // meters of movement that ends the iteration
  double floor = 1e-3;   // meters; residuals below this stop gaining weight
};

/// Starts from solve_mle and reweights each line by 1 / max(residual, floor)
/// until the position moves less than `tol`.
LocalizationResult solve_irls(const std::vector<BearingLine>& lines,
                              const IrlsOptions& options = {});

/// Weighted sum of squared perpendicular distances from `p` to the lines.
double weighted_cost(const std::vector<BearingLine>& lines, const Point2& p);

}  // namespace aoaloc
