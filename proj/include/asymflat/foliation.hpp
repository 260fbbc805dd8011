#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asymflat/extrapolate.hpp"
#include "asymflat/surface.hpp"

namespace asymflat {

enum class Condition { CMC, ConstTildeK, TildeKRatio, FreeBoundaryCMC };
std::string to_string(Condition c);
Condition condition_from_string(const std::string& s);

struct SolverConfig {
  int lmax = 12;
  int lquad = 0;  // 0 picks 2 lmax + 8
  double theta_exp = 0.5;
  double tol = 1e-10;
  int max_iter = 200;
  double damping = 0.5;
  Condition condition = Condition::CMC;
  std::optional<double> floor;  // smallest admissible rho

  int quadrature() const { return lquad > 0 ? lquad : 2 * lmax + 8; }
};

void validate(const SolverConfig& cfg);

// empirical lower bound on rho: 20 max(1, |m|)
double solver_floor(const MetricSpec& spec, const SolverConfig& cfg);

// 2/rho - 4m/rho^2 for the mean curvature conditions, 1/rho^2 - 3m/rho^3 for K~
double target_constant(const MetricSpec& spec, double rho, Condition c);
// K~/H on the base sphere: 1/(2 rho) - m/(2 rho^2)
double ratio_gamma(const MetricSpec& spec, double rho);

struct LeafResult {
  GraphSurface surface;
  Condition condition = Condition::CMC;
  double constant = 0.0;  // target value (0 for the ratio condition)
  double gamma = 0.0;     // ratio condition only
  double residual = 0.0;  // sup over nodes; K~ conditions scaled by rho
  int iterations = 0;
  double fb_defect = 0.0;  // hemisphere leaves
  Vector3d center() const { return surface.center; }
};

// seed, if given, replaces the zero graph at the nominal center
LeafResult solve_leaf(const MetricSpec& spec, double rho, const SolverConfig& cfg,
                      const GraphSurface* seed = nullptr);

// pointwise condition defect of a surface: Q - target at every node
std::vector<double> condition_defect(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid,
                                     Condition c, double constant, double gamma);

struct NestingViolation {
  int inner = 0;  // index of the inner leaf; the outer one is inner + 1
  double inner_max = 0.0;
  double outer_min = 0.0;
};

struct SweepResult {
  std::vector<LeafResult> leaves;
  std::vector<Vector3d> centroids;  // Euclidean area-weighted; tangential only on hemispheres
  Vector3d geometric_center = Vector3d::Zero();
  bool extrapolated = false;  // false: fewer than 4 leaves, outermost centroid reported
  std::array<PowerFit, 3> center_fit{};
  std::vector<std::pair<double, double>> radial_range;  // min and max |x| per leaf
  std::vector<NestingViolation> nesting;
  bool nested() const { return nesting.empty(); }
};

SweepResult sweep(const MetricSpec& spec, const std::vector<double>& rhos, const SolverConfig& cfg);

}  // namespace asymflat
