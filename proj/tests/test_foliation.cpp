#include <cmath>

#include "asymflat/foliation.hpp"
#include "asymflat/io.hpp"
#include "doctest.h"

using namespace asymflat;

namespace {

SolverConfig config(Condition c) {
  SolverConfig cfg;
  cfg.condition = c;
  return cfg;
}

double sup_defect(const MetricSpec& spec, const LeafResult& leaf, int lquad) {
  auto grid = make_grid(leaf.surface.domain, lquad);
  double s = 0.0;
  for (double f : condition_defect(spec, leaf.surface, grid, leaf.condition, leaf.constant, leaf.gamma))
    s = std::max(s, std::abs(f));
  return s;
}

}  // namespace

TEST_CASE("flat spheres are already leaves") {
  auto spec = flat_spec();
  spec.r_min = 1.0;
  auto leaf = solve_leaf(spec, 40.0, config(Condition::CMC));
  CHECK(leaf.residual < 1e-15);
  CHECK(leaf.iterations == 0);
  CHECK(leaf.surface.coeffs.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Schwarzschild CMC leaves are centered coordinate spheres") {
  auto spec = schwarzschild_spec(1.0);
  auto leaf = solve_leaf(spec, 60.0, config(Condition::CMC));
  CHECK(leaf.residual <= 1e-10);
  CHECK(leaf.center().norm() < 1e-9);
  CHECK(leaf.constant == doctest::Approx(2.0 / 60 - 4.0 / 3600).epsilon(1e-15));
  // independent evaluation of the defect on a finer grid
  CHECK(sup_defect(spec, leaf, 48) < 1e-9);
}

TEST_CASE("translation equivariance") {
  auto a = solve_leaf(schwarzschild_spec(1.0), 50.0, config(Condition::CMC));
  auto b = solve_leaf(schwarzschild_spec(1.0, Vector3d(3.0, -1.0, 2.0)), 50.0, config(Condition::CMC));
  CHECK((b.center() - Vector3d(3.0, -1.0, 2.0)).norm() < 1e-8);
  CHECK((b.surface.coeffs - a.surface.coeffs).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("seeded re-solve is idempotent") {
  auto spec = eps_as_spec(1.0, Vector3d(1.0, 2.0, 0.0), 2.0, 0.0, 1.0);
  auto cfg = config(Condition::ConstTildeK);
  auto leaf = solve_leaf(spec, 60.0, cfg);
  CHECK(leaf.residual <= 1e-10);
  auto again = solve_leaf(spec, 60.0, cfg, &leaf.surface);
  CHECK(again.iterations <= 2);
  CHECK((again.center() - leaf.center()).norm() < 1e-9);
}

TEST_CASE("K~ and ratio leaves converge") {
  auto spec = schwarzschild_spec(1.0);
  auto k = solve_leaf(spec, 50.0, config(Condition::ConstTildeK));
  CHECK(k.residual <= 1e-8);
  CHECK(k.center().norm() < 1e-9);
  auto r = solve_leaf(spec, 50.0, config(Condition::TildeKRatio));
  CHECK(r.residual <= 1e-8);
  CHECK(r.gamma == doctest::Approx(0.5 / 50 - 0.5 / 2500).epsilon(1e-15));
}

TEST_CASE("free boundary leaves in translated half-Schwarzschild") {
  auto spec = half_schwarzschild_spec(1.0, Vector3d(3.0, 0.0, 0.0));
  auto leaf = solve_leaf(spec, 80.0, config(Condition::FreeBoundaryCMC));
  CHECK(leaf.residual <= 1e-8);
  CHECK(leaf.fb_defect <= 1e-8);
  CHECK(std::abs(leaf.center()[0] - 3.0) < 1e-8);
  CHECK(leaf.center()[2] == 0.0);
}

TEST_CASE("sweep reports nesting and the geometric center") {
  auto spec = half_schwarzschild_spec(1.0, Vector3d(3.0, 0.0, 0.0));
  auto sw = sweep(spec, {50.0, 100.0, 200.0}, config(Condition::FreeBoundaryCMC));
  CHECK(sw.nested());
  CHECK_FALSE(sw.extrapolated);
  CHECK(std::abs(sw.geometric_center[0] - 3.0) < 1e-2);
  CHECK(sw.geometric_center[2] == 0.0);
  for (std::size_t i = 0; i + 1 < sw.radial_range.size(); ++i)
    CHECK(sw.radial_range[i].second < sw.radial_range[i + 1].first);
}

TEST_CASE("leaf JSON round trip") {
  auto leaf = solve_leaf(eps_as_spec(1.0, Vector3d(1.0, 0.0, 0.0), 2.0, 0.0, 1.0), 40.0, config(Condition::CMC));
  auto back = leaf_from_json(json::parse(to_json(leaf).dump()));
  CHECK(back.surface.coeffs == leaf.surface.coeffs);
  CHECK(back.surface.center == leaf.surface.center);
  CHECK(back.condition == leaf.condition);
  CHECK(back.residual == leaf.residual);
  CHECK(back.iterations == leaf.iterations);
}

TEST_CASE("solver errors") {
  CHECK_THROWS_AS(solve_leaf(schwarzschild_spec(1.0), 50.0, config(Condition::FreeBoundaryCMC)), Error);
  CHECK_THROWS_AS(solve_leaf(half_schwarzschild_spec(1.0), 50.0, config(Condition::CMC)), Error);
  CHECK_THROWS_AS(solve_leaf(schwarzschild_spec(1.0), 10.0, config(Condition::CMC)), Error);
  SolverConfig bad;
  bad.damping = 0.0;
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK_THROWS_AS(sweep(schwarzschild_spec(1.0), {100.0, 50.0}, bad), Error);
  CHECK_THROWS_AS(condition_from_string("minimal"), Error);
  SolverConfig few;
  few.max_iter = 2;
  CHECK_THROWS_AS(solve_leaf(eps_as_spec(1.0, Vector3d(1.0, 2.0, 0.0), 2.0, 0.0, 1.0), 50.0, few), Error);
}
