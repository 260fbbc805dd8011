#include "asymflat/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "asymflat/invariants.hpp"
#include "asymflat/parallel.hpp"
#include "asymflat/surface.hpp"

namespace asymflat {

using std::numbers::pi;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_ladder(const MetricSpec& spec, const std::vector<double>& r) {
  if (r.size() < 2) fail(ErrorKind::TooFewSamples, "identity ladder needs at least two radii");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0) || !std::isfinite(r[i])) fail(ErrorKind::InvalidInput, "radii must be positive");
    if (i > 0 && !(r[i] > r[i - 1])) fail(ErrorKind::InvalidInput, "radii must be strictly increasing");
  }
  if (r.front() <= 2.0 * spec.rmin()) fail(ErrorKind::InvalidInput, "ladder reaches inside the metric domain");
}

// residuals at the noise level are stored as exact zeros so the exponent fit skips them
void finish(IdentityReport& rep, const std::vector<double>& noise) {
  for (std::size_t i = 0; i < rep.residuals.size(); ++i) {
    rep.residuals[i] = std::abs(rep.residuals[i]);
    if (rep.residuals[i] <= noise[i]) rep.residuals[i] = 0.0;
  }
  rep.fit = fit_exponent(rep.radii, rep.residuals);
  rep.pass = rep.fit.exact || rep.fit.exponent < rep.bound;
}

Vector3d frak(const Vector3d& x, const Vector3d& a, double rho) { return (x - a) / rho; }

struct Sample {
  double residual = 0.0;
  double noise = 0.0;
};

}  // namespace

double nominal_mass(const MetricSpec& spec) { return spec.half() ? 0.5 * spec.m : spec.m; }

double g_term(const MetricSpec& spec, const Vector3d& x, const Vector3d& a, double rho) {
  const MetricJet p = deviation_jet(spec, x, Reference::ConformalSchwarzschild);
  const Vector3d r = frak(x, a, rho);
  double cubic = 0.0, div = 0.0, trace_d = 0.0;
  for (int k = 0; k < 3; ++k) {
    cubic += r[k] * r.dot(p.dg[k] * r);
    for (int i = 0; i < 3; ++i) div += p.dg[i](i, k) * r[k];
    trace_d += p.dg[k].trace() * r[k];
  }
  return 0.5 * cubic + 2.0 * r.dot(p.g * r) / rho - div - p.g.trace() / rho + 0.5 * trace_d;
}

IdentityReport h_expansion_residual(const MetricSpec& spec, const std::vector<double>& rhos, const Vector3d& a,
                                    const HExpansionTerms& terms, int lquad) {
  validate(spec);
  if (spec.tau < 1.0) fail(ErrorKind::Unsupported, "mean curvature expansion needs an aS metric (tau = 1)");
  check_ladder(spec, rhos);
  const bool half = spec.half();
  if (half && a[2] != 0.0) fail(ErrorKind::InvalidInput, "hemisphere center must lie on the boundary plane");
  const Domain dom = half ? Domain::Hemisphere : Domain::Sphere;
  const SphereGrid grid = make_grid(dom, lquad);
  const double m = spec.m;

  IdentityReport rep;
  rep.tag = terms.quadratic && terms.offset && terms.g_term ? "h-expansion" : "h-expansion-ablated";
  rep.radii = rhos;
  rep.claimed = -4.0;
  rep.bound = rep.claimed + 0.3;
  auto samples = parallel_map(rhos.size(), [&](std::size_t k) {
    const double rho = rhos[k];
    const auto d = extrinsic(spec, round_surface(a, rho, dom), grid, CurvatureLevel::First);
    Sample s;
    for (const auto& n : d.nodes) {
      double e = 2.0 / rho - 4.0 * m / (rho * rho);
      if (terms.quadratic) e += 9.0 * m * m / std::pow(rho, 3);
      if (terms.offset) e += 6.0 * m * (n.x - a).dot(a) / std::pow(rho, 4);
      if (terms.g_term) e += g_term(spec, n.x, a, rho);
      s.residual = std::max(s.residual, std::abs(n.H - e));
    }
    s.noise = 64.0 * kEps * 2.0 / rho;
    return s;
  });
  std::vector<double> noise;
  for (const auto& s : samples) {
    rep.residuals.push_back(s.residual);
    noise.push_back(s.noise);
  }
  finish(rep, noise);
  return rep;
}

std::vector<IdentityReport> kh_relation_residual(const MetricSpec& spec, const std::vector<double>& rhos,
                                                 const Vector3d& a, int lquad) {
  validate(spec);
  if (spec.half()) fail(ErrorKind::Unsupported, "K-H relation is stated for closed coordinate spheres");
  const EpsData e = eps_data(spec);
  check_ladder(spec, rhos);
  const SphereGrid grid = make_grid(Domain::Sphere, lquad);

  std::vector<IdentityReport> out(2);
  out[0].tag = "kh-bracket";
  out[0].claimed = std::max(-3.0 - e.epsilon, -5.0);
  out[0].alternate = std::min(-3.0 - e.epsilon, -5.0);
  out[1].tag = "kh-conformal";
  out[1].claimed = -2.0 - e.epsilon;
  for (auto& r : out) {
    r.radii = rhos;
    r.bound = r.claimed + 0.3;
  }

  // conformal factor of the model metric f delta and its gradient
  auto model = [&](const Vector3d& x, Vector3d& grad) {
    const double r = x.norm(), r2 = r * r, r3 = r2 * r;
    const double cx = e.c.dot(x);
    grad = -2.0 * e.m * x / r3 + e.gamma1 * (e.c / r3 - 3.0 * cx * x / (r3 * r2)) - 2.0 * e.gamma2 * x / (r2 * r2);
    return 1.0 + 2.0 * e.m / r + e.gamma1 * cx / r3 + e.gamma2 / r2;
  };

  auto samples = parallel_map(rhos.size(), [&](std::size_t k) {
    const double rho = rhos[k];
    const auto d = extrinsic(spec, round_surface(a, rho, Domain::Sphere), grid, CurvatureLevel::First);
    std::array<Sample, 2> s;
    for (const auto& n : d.nodes) {
      const double bracket = 1.0 - 2.0 * e.m / rho + (9.0 * e.m * e.m - 3.0 * e.gamma2) / (2.0 * rho * rho) +
                             3.0 * e.m * n.x.dot(a) / std::pow(rho, 3) -
                             1.5 * e.gamma1 * n.x.dot(e.c) / std::pow(rho, 3);
      s[0].residual = std::max(s[0].residual, std::abs(2.0 * rho * n.K - n.H * bracket));

      const MetricJet J = eval_jet(spec, n.x);
      const Vector3d X = n.x - a;
      Vector3d grad;
      const double f = model(n.x, grad);
      const double xi = (f + 0.5 * grad.dot(X)) / f;
      Matrix3d L = 2.0 * J.g;
      for (int i = 0; i < 3; ++i) L += X[i] * J.dg[i];
      s[1].residual = std::max(s[1].residual, (L - 2.0 * xi * J.g).norm());
    }
    s[0].noise = 64.0 * kEps * 2.0 / rho;
    s[1].noise = 64.0 * kEps;
    return s;
  });
  for (int t = 0; t < 2; ++t) {
    std::vector<double> noise;
    for (const auto& s : samples) {
      out[t].residuals.push_back(s[t].residual);
      noise.push_back(s[t].noise);
    }
    finish(out[t], noise);
  }
  return out;
}

IdentityReport moment_identity(const MetricSpec& spec, const std::vector<double>& rhos, const MomentOptions& opt) {
  validate(spec);
  if (spec.m == 0.0) fail(ErrorKind::InvalidInput, "moment identity needs nonzero mass");
  check_ladder(spec, rhos);
  const bool half = spec.half();
  const Vector3d a = opt.a;
  if (half && a[2] != 0.0) fail(ErrorKind::InvalidInput, "hemisphere center must lie on the boundary plane");
  const Domain dom = half ? Domain::Hemisphere : Domain::Sphere;
  const SphereGrid grid = make_grid(dom, opt.lquad);

  const std::vector<double> fr = opt.flux_radii.empty() ? geometric_ladder(100.0, 6400.0, 2.0) : opt.flux_radii;
  const double mass = opt.mass ? *opt.mass : mass_series(spec, fr, 32, true).fit.limit;
  Vector3d C = opt.center ? *opt.center : center_series(spec, fr, 32, true).limit();
  if (half) C[2] = 0.0;

  IdentityReport rep;
  rep.tag = half ? "moment-hemisphere" : "moment";
  rep.radii = rhos;
  rep.claimed = -1.0;
  rep.bound = rep.claimed + 0.3;
  rep.target = -8.0 * pi * mass * C;
  rep.values = parallel_map(rhos.size(), [&](std::size_t k) {
    const double rho = rhos[k];
    const auto d = extrinsic(spec, round_surface(a, rho, dom), grid, CurvatureLevel::First);
    std::vector<Vector3d> v(d.nodes.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& n = d.nodes[i];
      v[i] = (n.x - a) * g_term(spec, n.x, a, rho) * n.dA_flat;
    }
    Vector3d I = integrate3(grid, v);
    if (half) I[2] = 0.0;
    return I;
  });
  std::vector<double> noise;
  for (const auto& v : rep.values) {
    rep.residuals.push_back((v - rep.target).norm());
    // the target comes from extrapolated flux limits, good to about 1e-9
    noise.push_back(1e-8 * 8.0 * pi * std::abs(mass) * (1.0 + C.norm()));
  }
  if (rhos.size() >= 4) {
    for (int k = 0; k < 3; ++k) {
      std::vector<double> c;
      for (const auto& v : rep.values) c.push_back(v[k]);
      rep.limit[k] = extrapolate(rhos, c).limit;
    }
  } else {
    rep.limit = rep.values.back();
  }
  finish(rep, noise);
  return rep;
}

IntegrationIdentity cmc_integration_identity(const MetricSpec& spec, double rho, const Vector2d& b, int lquad) {
  validate(spec);
  if (!spec.half() && spec.family != Family::Flat)
    fail(ErrorKind::InvalidInput, "integration identity needs a half-space spec");
  if (!(rho > 2.0 * spec.rmin() + b.norm())) fail(ErrorKind::InvalidInput, "hemisphere reaches inside r_min");
  const SphereGrid grid = make_grid(Domain::Hemisphere, lquad);
  const Vector3d c(b[0], b[1], 0.0);
  const double dS = rho * rho;

  IntegrationIdentity out;
  std::array<std::vector<Vector3d>, 5> f;  // lhs then the four right-hand integrands
  std::array<std::vector<Vector3d>, 5> g;  // their magnitudes
  for (auto& v : f) v.resize(grid.size());
  for (auto& v : g) v.resize(grid.size());
  for (int n = 0; n < grid.size(); ++n) {
    const Vector3d r = grid.dir[n];
    const Vector3d x = c + rho * r;
    const MetricJet e = deviation_jet(spec, x, Reference::Flat);
    const Vector3d xb = x - c;
    double cubic = 0.0, div = 0.0;
    for (int k = 0; k < 3; ++k) {
      cubic += r[k] * r.dot(e.dg[k] * r);
      for (int i = 0; i < 3; ++i) div += e.dg[i](i, k) * r[k];
    }
    const double quad = r.dot(e.g * r);
    const Vector3d lin = e.g.trace() * r + e.g * r;
    f[0][n] = 0.5 * xb * cubic * dS;
    f[1][n] = 0.5 * xb * div * dS;
    f[2][n] = -2.0 * xb * quad / rho * dS;
    f[3][n] = 0.5 * lin * dS;
    for (int t = 0; t < 4; ++t) g[t][n] = f[t][n].cwiseAbs();
  }
  std::array<Vector3d, 5> I, M;
  for (int t = 0; t < 4; ++t) {
    I[t] = integrate3(grid, f[t]);
    M[t] = integrate3(grid, g[t]);
  }
  // equator: outward conormal -e3, line element rho dphi
  I[4].setZero();
  M[4].setZero();
  for (int j = 0; j < grid.nphi; ++j) {
    const Vector3d r(std::cos(grid.phi[j]), std::sin(grid.phi[j]), 0.0);
    const Vector3d x = c + rho * r;
    const MetricJet e = deviation_jet(spec, x, Reference::Flat);
    const Vector3d v = 0.5 * (x - c) * r.dot(e.g.col(2)) * rho * grid.equator_weight();
    I[4] += v;
    M[4] += v.cwiseAbs();
  }
  out.lhs = I[0].head<2>();
  for (int t = 0; t < 4; ++t) {
    out.terms[t] = I[t + 1].head<2>();
    out.rhs += out.terms[t];
  }
  out.gap = (out.lhs - out.rhs).cwiseAbs().maxCoeff();
  for (const auto& m : M) out.magnitude += m.head<2>().maxCoeff();
  out.relative = out.magnitude > 0.0 ? out.gap / out.magnitude : out.gap;
  return out;
}

IdentityReport integration_identity_report(const MetricSpec& spec, const std::vector<double>& radii, const Vector2d& b,
                                           double tol, int lquad) {
  IdentityReport rep;
  rep.tag = "integration-by-parts";
  rep.radii = radii;
  rep.bound = tol;
  const auto res = parallel_map(radii.size(), [&](std::size_t k) {
    return cmc_integration_identity(spec, radii[k], b, lquad).relative;
  });
  rep.residuals = res;
  rep.pass = true;
  for (double r : res) rep.pass = rep.pass && r <= tol;
  rep.fit = fit_exponent(radii, std::vector<double>(radii.size(), 0.0));
  return rep;
}

std::vector<IdentityReport> appendixA_relations(const MetricSpec& spec, const std::vector<double>& radii,
                                                std::optional<double> r0, int lquad) {
  validate(spec);
  check_ladder(spec, radii);
  const bool half = spec.half();
  const Domain dom = half ? Domain::Hemisphere : Domain::Sphere;
  const SphereGrid grid = make_grid(dom, lquad);
  const double m = nominal_mass(spec);
  auto meas = parallel_map(radii.size(), [&](std::size_t k) {
    return measures(spec, round_surface(Vector3d::Zero(), radii[k], dom), grid, r0.value_or(spec.rmin() + spec.c.norm()));
  });

  std::vector<IdentityReport> out(half ? 1 : 3);
  if (half) {
    out[0].tag = "volume-area-boundary";
  } else {
    out[0].tag = "volume-area";
    out[1].tag = "area-mean";
    out[2].tag = "volume-mean";
  }
  std::vector<double> noise;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k], r2 = r * r, r3 = r2 * r;
    const Measures& q = meas[k];
    if (half) {
      out[0].residuals.push_back(q.volume - (0.5 * r * q.area - pi / 3.0 * r3 + 2.0 * pi * m * r2));
    } else {
      out[0].residuals.push_back(q.volume - (0.5 * r * q.area - 2.0 * pi / 3.0 * r3 + 2.0 * pi * m * r2));
      out[1].residuals.push_back(0.5 * r2 * q.mean - (0.5 * r * q.area + 2.0 * pi * r3 - 4.0 * pi * m * r2));
      out[2].residuals.push_back(q.volume - (0.5 * r2 * q.mean - 8.0 * pi / 3.0 * r3 + 6.0 * pi * m * r2));
    }
    noise.push_back(1e-13 * r3);
  }
  for (auto& rep : out) {
    rep.radii = radii;
    rep.claimed = 2.0;
    rep.bound = 2.0;
    finish(rep, noise);
  }
  return out;
}

}  // namespace asymflat
