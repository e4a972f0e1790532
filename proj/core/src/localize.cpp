#include "aoaloc/localize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "aoaloc/error.hpp"

namespace aoaloc {
namespace {

Eigen::Matrix2d projector(const Point2& n) {
  return Eigen::Matrix2d::Identity() - n * n.transpose();
}

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

void check_lines(const std::vector<BearingLine>& lines) {
  if (lines.size() < 2) throw UnlocalizableError("need at least two bearing lines");
  for (const auto& l : lines) {
    if (!l.anchor.allFinite() || !l.direction.allFinite()) {
      throw InvalidArgument("bearing line has non-finite anchor or direction");
    }
    if (std::abs(l.direction.norm() - 1.0) > 1e-9) {
      throw InvalidArgument("bearing direction must be a unit vector");
    }
    if (!(l.weight > 0.0) || !std::isfinite(l.weight)) {
      throw InvalidArgument("bearing weight must be finite and positive");
    }
  }
}

bool all_parallel(const std::vector<BearingLine>& lines) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (std::abs(cross(lines[i].direction, lines[j].direction)) >= kParallelTolerance) {
        return false;
      }
    }
  }
  return true;
}

void fill_diagnostics(const std::vector<BearingLine>& lines, LocalizationResult& r) {
  r.residuals.resize(lines.size());
  r.behind_anchor.resize(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    r.residuals[i] = lines[i].distance(r.position);
    r.behind_anchor[i] = lines[i].along(r.position) < 0.0;
  }
}

// Weighted normal equations with explicit weights (overriding line.weight).
LocalizationResult weighted_solve(const std::vector<BearingLine>& lines,
                                  const std::vector<double>& weights) {
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Eigen::Matrix2d p = weights[i] * projector(lines[i].direction);
    a += p;
    b += p * lines[i].anchor;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(a);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(1);

  LocalizationResult r;
  r.condition_flag = !(lo > 0.0) || hi / lo > kConditionLimit;
  if (!(lo > 0.0)) throw UnlocalizableError("bearing lines are parallel");
  r.position = a.ldlt().solve(b);
  r.weights = weights;
  r.iterations = 1;
  r.inliers.resize(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) r.inliers[i] = i;
  fill_diagnostics(lines, r);
  return r;
}

std::optional<Point2> intersect(const BearingLine& a, const BearingLine& b, double min_sin) {
  const double s = cross(a.direction, b.direction);
  if (std::abs(s) < min_sin) return std::nullopt;
  const double t = cross(b.anchor - a.anchor, b.direction) / s;
  return a.anchor + t * a.direction;
}

}  // namespace

BearingLine BearingLine::from_azimuth(const Point2& anchor, double azimuth, double weight,
                                      std::string array_id) {
  return BearingLine{anchor, unit_vector(azimuth), weight, std::move(array_id)};
}

double BearingLine::distance(const Point2& p) const { return std::abs(cross(direction, p - anchor)); }

std::string_view to_string(Solver solver) {
  switch (solver) {
    case Solver::Mle: return "mle";
    case Solver::Ransac: return "ransac";
    case Solver::Irls: return "irls";
  }
  return "unknown";
}

Solver parse_solver(std::string_view name) {
  if (name == "mle") return Solver::Mle;
  if (name == "ransac") return Solver::Ransac;
  if (name == "irls") return Solver::Irls;
  throw InvalidArgument("unknown solver '" + std::string(name) + "'");
}

double weighted_cost(const std::vector<BearingLine>& lines, const Point2& p) {
  double cost = 0.0;
  for (const auto& l : lines) {
    const double d = l.distance(p);
    cost += l.weight * d * d;
  }
  return cost;
}

LocalizationResult solve_mle(const std::vector<BearingLine>& lines) {
  check_lines(lines);
  if (all_parallel(lines)) throw UnlocalizableError("all bearing lines are parallel");
  std::vector<double> w(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) w[i] = lines[i].weight;
  LocalizationResult r = weighted_solve(lines, w);
  r.method = Solver::Mle;
  return r;
}

LocalizationResult solve_ransac(const std::vector<BearingLine>& lines,
                                const RansacOptions& options) {
  check_lines(lines);
  if (!(options.threshold > 0.0)) throw InvalidArgument("RANSAC threshold must be positive");
  if (options.iterations < 1) throw InvalidArgument("RANSAC iterations must be >= 1");

  const std::size_t n = lines.size();
  std::vector<std::size_t> best_inliers;
  double best_residual = std::numeric_limits<double>::infinity();
  bool found = false;

  for (int it = 0; it < options.iterations; ++it) {
    // Independent stream per iteration so the draw order never depends on
    // how iterations are scheduled.
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                      static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(it)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);

    const auto candidate = intersect(lines[i], lines[j], options.min_sin_angle);
    if (!candidate) continue;
    found = true;

    std::vector<std::size_t> inliers;
    double residual = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = lines[k].distance(*candidate);
      if (d <= options.threshold) {
        inliers.push_back(k);
        residual += d;
      }
    }
    if (inliers.size() > best_inliers.size() ||
        (inliers.size() == best_inliers.size() && residual < best_residual)) {
      best_inliers = std::move(inliers);
      best_residual = residual;
    }
  }
  if (!found) throw UnlocalizableError("RANSAC found no non-parallel pair of bearing lines");

  std::vector<BearingLine> subset;
  for (std::size_t k : best_inliers) subset.push_back(lines[k]);
  LocalizationResult refit = solve_mle(subset);

  LocalizationResult r;
  r.method = Solver::Ransac;
  r.position = refit.position;
  r.condition_flag = refit.condition_flag;
  r.inliers = best_inliers;
  r.weights.assign(n, 0.0);
  for (std::size_t k : best_inliers) r.weights[k] = lines[k].weight;
  r.iterations = options.iterations;
  fill_diagnostics(lines, r);
  return r;
}

LocalizationResult solve_irls(const std::vector<BearingLine>& lines, const IrlsOptions& options) {
  if (options.max_iter < 1) throw InvalidArgument("IRLS max_iter must be >= 1");
  if (!(options.tol > 0.0) || !(options.floor > 0.0)) {
    throw InvalidArgument("IRLS tol and floor must be positive");
  }
  LocalizationResult r = solve_mle(lines);
  std::vector<double> w(lines.size());
  int iterations = 0;
  while (iterations < options.max_iter) {
    ++iterations;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      w[i] = 1.0 / std::max(r.residuals[i], options.floor);
    }
    LocalizationResult next = weighted_solve(lines, w);
    const double moved = (next.position - r.position).norm();
    r = std::move(next);
    if (moved < options.tol) break;
  }
  r.method = Solver::Irls;
  r.iterations = iterations;
  return r;
}

}  // namespace aoaloc
