#include "asymflat/foliation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "asymflat/parallel.hpp"

namespace asymflat {

using std::numbers::pi;

std::string to_string(Condition c) {
  switch (c) {
    case Condition::CMC: return "cmc";
    case Condition::ConstTildeK: return "const-tilde-k";
    case Condition::TildeKRatio: return "tilde-k-ratio";
    case Condition::FreeBoundaryCMC: return "fb-cmc";
  }
  return "?";
}

Condition condition_from_string(const std::string& s) {
  if (s == "cmc" || s == "CMC") return Condition::CMC;
  if (s == "const-tilde-k" || s == "ConstTildeK" || s == "tilde-k") return Condition::ConstTildeK;
  if (s == "tilde-k-ratio" || s == "TildeKRatio" || s == "ratio") return Condition::TildeKRatio;
  if (s == "fb-cmc" || s == "FreeBoundaryCMC") return Condition::FreeBoundaryCMC;
  fail(ErrorKind::InvalidInput, "unknown condition '" + s + "'");
}

void validate(const SolverConfig& cfg) {
  if (cfg.lmax < 2) fail(ErrorKind::InvalidInput, "lmax must be at least 2");
  if (cfg.quadrature() < cfg.lmax + 2) fail(ErrorKind::InvalidInput, "quadrature degree too small for lmax");
  if (!(cfg.theta_exp > 0.0 && cfg.theta_exp < 1.0)) fail(ErrorKind::InvalidInput, "graph exponent must lie in (0,1)");
  if (!(cfg.tol > 0.0)) fail(ErrorKind::InvalidInput, "tolerance must be positive");
  if (cfg.max_iter < 1) fail(ErrorKind::InvalidInput, "max_iter must be positive");
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) fail(ErrorKind::InvalidInput, "damping must lie in (0,1]");
}

double solver_floor(const MetricSpec& spec, const SolverConfig& cfg) {
  return cfg.floor.value_or(20.0 * std::max(1.0, std::abs(spec.m)));
}

double target_constant(const MetricSpec& spec, double rho, Condition c) {
  const double m = spec.m;
  switch (c) {
    case Condition::CMC:
    case Condition::FreeBoundaryCMC: return 2.0 / rho - 4.0 * m / (rho * rho);
    case Condition::ConstTildeK: return 1.0 / (rho * rho) - 3.0 * m / (rho * rho * rho);
    case Condition::TildeKRatio: return 0.0;
  }
  return 0.0;
}

double ratio_gamma(const MetricSpec& spec, double rho) { return 0.5 / rho - 0.5 * spec.m / (rho * rho); }

namespace {

bool uses_ricci(Condition c) { return c == Condition::ConstTildeK || c == Condition::TildeKRatio; }

std::vector<double> defect_from(const ExtrinsicData& d, Condition c, double constant, double gamma) {
  std::vector<double> F(d.nodes.size());
  for (std::size_t i = 0; i < F.size(); ++i) {
    const auto& n = d.nodes[i];
    const double kt = n.K - 0.5 * n.ric_nn;
    switch (c) {
      case Condition::CMC:
      case Condition::FreeBoundaryCMC: F[i] = n.H - constant; break;
      case Condition::ConstTildeK: F[i] = kt - constant; break;
      case Condition::TildeKRatio: F[i] = kt - gamma * n.H; break;
    }
  }
  return F;
}

// coefficient of -(Delta_1 + 2) in the linearized condition
double linear_scale(Condition c, double rho, double gamma) {
  switch (c) {
    case Condition::CMC:
    case Condition::FreeBoundaryCMC: return 1.0 / (rho * rho);
    case Condition::ConstTildeK: return 1.0 / (rho * rho * rho);
    case Condition::TildeKRatio: return (1.0 - gamma * rho) / (rho * rho * rho);
  }
  return 1.0;
}

}  // namespace

std::vector<double> condition_defect(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid,
                                     Condition c, double constant, double gamma) {
  auto d = extrinsic(spec, s, grid, uses_ricci(c) ? CurvatureLevel::Ricci : CurvatureLevel::First);
  return defect_from(d, c, constant, gamma);
}

LeafResult solve_leaf(const MetricSpec& spec, double rho, const SolverConfig& cfg, const GraphSurface* seed) {
  validate(spec);
  validate(cfg);
  const Condition cond = cfg.condition;
  const bool fb = cond == Condition::FreeBoundaryCMC;
  if (fb != spec.half()) {
    fail(ErrorKind::InvalidInput,
         "condition " + to_string(cond) + " incompatible with family " + to_string(spec.family));
  }
  const double floor = solver_floor(spec, cfg);
  if (!(rho >= floor)) {
    std::ostringstream os;
    os << "rho " << rho << " below solver floor " << floor;
    fail(ErrorKind::InvalidInput, os.str());
  }
  const Domain dom = fb ? Domain::Hemisphere : Domain::Sphere;
  const SphereGrid grid = make_grid(dom, cfg.quadrature());
  const HarmonicTable table = make_table(grid, cfg.lmax);

  LeafResult out;
  out.condition = cond;
  out.constant = target_constant(spec, rho, cond);
  out.gamma = cond == Condition::TildeKRatio ? ratio_gamma(spec, rho) : 0.0;
  GraphSurface& s = out.surface;
  if (seed) {
    if (seed->domain != dom) fail(ErrorKind::InvalidInput, "seed surface has the wrong domain");
    s = *seed;
    s.rho = rho;
    s.theta_exp = cfg.theta_exp;
    s.resize(cfg.lmax);
  } else {
    Vector3d c0 = spec.family == Family::EpsAS ? spec.c : Vector3d::Zero();
    s = round_surface(c0, rho, dom, cfg.lmax);
    s.theta_exp = cfg.theta_exp;
  }
  if (fb) s.center[2] = 0.0;
  validate(s);
  GraphSurface prev = s;

  const double lin = linear_scale(cond, rho, out.gamma);
  const double res_scale = uses_ricci(cond) ? rho : 1.0;
  const int nc = fb ? 2 : 3;
  const CurvatureLevel level = uses_ricci(cond) ? CurvatureLevel::Ricci : CurvatureLevel::First;
  auto moment = [&](const std::vector<double>& F) {
    std::vector<Vector3d> mom(grid.size());
    for (int i = 0; i < grid.size(); ++i) mom[i] = F[i] * grid.dir[i];
    return integrate3(grid, mom);
  };
  // response of the degree-one moment to center shifts, by central differences
  Eigen::FullPivLU<Eigen::MatrixXd> jac;
  const bool move = spec.m != 0.0;
  if (move) {
    const double h = 0.05 * std::max(1.0, std::abs(spec.m));
    Eigen::MatrixXd J(nc, nc);
    for (int k = 0; k < nc; ++k) {
      GraphSurface p = s, q = s;
      p.center[k] += h;
      q.center[k] -= h;
      Vector3d dm = (moment(defect_from(extrinsic(spec, p, grid, level), cond, out.constant, out.gamma)) -
                     moment(defect_from(extrinsic(spec, q, grid, level), cond, out.constant, out.gamma))) /
                    (2.0 * h);
      J.col(k) = dm.head(nc);
    }
    jac.compute(J);
    jac.setThreshold(1e-8);
    if (jac.rank() < nc) fail(ErrorKind::Degenerate, "center shifts do not control the degree-one defect");
  }

  double best = INFINITY, last = INFINITY;
  int best_it = 0, polish = 0;
  bool reached = false;
  for (int it = 0;; ++it) {
    auto d = extrinsic(spec, s, grid, level);
    auto F = defect_from(d, cond, out.constant, out.gamma);
    double sup = 0.0;
    for (double f : F) sup = std::max(sup, std::abs(f));
    const double res = sup * res_scale;
    if (!std::isfinite(res)) fail(ErrorKind::NoConvergence, "leaf solver diverged");
    if (reached) {
      // keep iterating while the residual still drops
      if (!(res < 0.8 * last) || ++polish > 40) break;
    } else if (res <= cfg.tol) {
      reached = true;
      out.iterations = it;
    }
    out.residual = res;
    last = res;
    if (fb) out.fb_defect = free_boundary_defect(d);
    if (!reached) {
      if (res < 0.5 * best) {
        best = res;
        best_it = it;
      }
      if (it >= cfg.max_iter || it - best_it > 40) {
        std::ostringstream os;
        os << "leaf at rho " << rho << " stalled at residual " << res << " after " << it << " iterations";
        fail(ErrorKind::NoConvergence, os.str());
      }
    }
    prev = s;
    Eigen::VectorXd Fv = Eigen::Map<const Eigen::VectorXd>(F.data(), F.size());
    Eigen::VectorXd Fc = sh_project(grid, table, Fv);
    if (move) {
      Eigen::VectorXd step = jac.solve(Eigen::VectorXd(moment(F).head(nc)));
      for (int k = 0; k < nc; ++k) s.center[k] -= cfg.damping * step[k];
    }
    for (int m = -1; m <= 1; ++m) Fc[sh_index(1, m)] = 0.0;
    Eigen::VectorXd dR = poisson_solve(Fc, dom) / lin;
    s.coeffs += dR / s.scale();
    try {
      validate(s);
    } catch (const Error& e) {
      fail(ErrorKind::Degenerate, std::string("leaf solver lost embedding: ") + e.what());
    }
  }
  // the last accepted state is the one whose residual was recorded
  s = prev;
  return out;
}

SweepResult sweep(const MetricSpec& spec, const std::vector<double>& rhos, const SolverConfig& cfg) {
  if (rhos.empty()) fail(ErrorKind::InvalidInput, "empty radius list");
  for (std::size_t i = 1; i < rhos.size(); ++i)
    if (!(rhos[i] > rhos[i - 1])) fail(ErrorKind::InvalidInput, "radius list must be strictly increasing");
  SweepResult out;
  out.leaves = parallel_map(rhos.size(), [&](std::size_t i) { return solve_leaf(spec, rhos[i], cfg); });
  const bool half = spec.half();
  const SphereGrid grid = make_grid(half ? Domain::Hemisphere : Domain::Sphere, cfg.quadrature());
  for (const auto& leaf : out.leaves) {
    auto d = extrinsic(spec, leaf.surface, grid, CurvatureLevel::First);
    Vector3d c = euclidean_centroid(grid, d);
    if (half) c[2] = 0.0;
    out.centroids.push_back(c);
    double lo = INFINITY, hi = 0.0;
    for (const auto& n : d.nodes) {
      lo = std::min(lo, n.x.norm());
      hi = std::max(hi, n.x.norm());
    }
    for (const auto& b : d.boundary) {
      lo = std::min(lo, b.g.x.norm());
      hi = std::max(hi, b.g.x.norm());
    }
    out.radial_range.emplace_back(lo, hi);
  }
  for (std::size_t k = 0; k + 1 < out.leaves.size(); ++k)
    if (!(out.radial_range[k + 1].first > out.radial_range[k].second))
      out.nesting.push_back({int(k), out.radial_range[k].second, out.radial_range[k + 1].first});

  if (rhos.size() >= 4) {
    out.extrapolated = true;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> v(rhos.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = out.centroids[i][k];
      out.center_fit[k] = extrapolate(rhos, v);
      out.geometric_center[k] = out.center_fit[k].limit;
    }
  } else {
    out.geometric_center = out.centroids.back();
  }
  return out;
}

}  // namespace asymflat
