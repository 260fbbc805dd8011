#include "asymflat/invariants.hpp"

#include <cmath>
#include <numbers>

#include "asymflat/parallel.hpp"

namespace asymflat {

using std::numbers::pi;

namespace {

struct FluxSample {
  double mass;       // (div e - d tr e)(x/r)
  Vector3d center;   // U(x_i, e)(x/r)
};

FluxSample flux_integrands(const MetricSpec& spec, const Vector3d& x) {
  auto comp = metric_components<1>(spec, x);
  const double r = x.norm();
  const Vector3d n = x / r;
  Matrix3d e;
  std::array<Matrix3d, 3> de;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto& J = comp[detail::sym_index(i, j)];
      e(i, j) = J.value() - (i == j ? 1.0 : 0.0);
      for (int k = 0; k < 3; ++k) de[k](i, j) = J.grad(k);
    }
  Vector3d form;  // div e - d tr e
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += de[j](i, j) - de[i](j, j);
    form[i] = s;
  }
  FluxSample out;
  out.mass = form.dot(n);
  const double tr = e.trace();
  out.center = x * out.mass - e * n + tr * n;
  return out;
}

struct FluxIntegrals {
  double mass;
  Vector3d center;
};

// raw integrals (without 1/16 pi) including the circle terms for half-spaces
FluxIntegrals flux_integrals(const MetricSpec& spec, double r, int lquad) {
  validate(spec);
  const Domain dom = spec.half() ? Domain::Hemisphere : Domain::Sphere;
  auto grid = make_grid(dom, lquad);
  std::vector<double> m(grid.size());
  std::vector<Vector3d> c(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    auto s = flux_integrands(spec, r * grid.dir[i]);
    m[i] = s.mass * r * r;
    c[i] = s.center * r * r;
  }
  FluxIntegrals out{integrate(grid, m), integrate3(grid, c)};
  if (dom == Domain::Hemisphere) {
    // e(x/r, vartheta) with vartheta = -e3 on the boundary circle
    std::vector<double> bm(grid.nphi), b1(grid.nphi), b2(grid.nphi);
    for (int j = 0; j < grid.nphi; ++j) {
      Vector3d x(r * std::cos(grid.phi[j]), r * std::sin(grid.phi[j]), 0.0);
      auto comp = metric_components<0>(spec, x);
      double ev = 0.0;
      for (int i = 0; i < 2; ++i) ev -= comp[detail::sym_index(i, 2)].value() * x[i] / r;
      bm[j] = ev * r * grid.equator_weight();
      b1[j] = x[0] * bm[j];
      b2[j] = x[1] * bm[j];
    }
    out.mass -= pairwise_sum(bm);
    out.center[0] -= pairwise_sum(b1);
    out.center[1] -= pairwise_sum(b2);
    out.center[2] = 0.0;
  }
  return out;
}

}  // namespace

double flux_mass(const MetricSpec& spec, double r, int lquad) {
  return flux_integrals(spec, r, lquad).mass / (16.0 * pi);
}

Vector3d flux_center(const MetricSpec& spec, double r, int lquad) {
  auto f = flux_integrals(spec, r, lquad);
  if (std::abs(f.mass) < 1e-300) fail(ErrorKind::Degenerate, "center of mass undefined for zero mass");
  return f.center / f.mass;
}

ScalarSeries mass_series(const MetricSpec& spec, const std::vector<double>& radii, int lquad, bool two_term) {
  ScalarSeries s;
  s.radii = radii;
  s.values = parallel_map(radii.size(), [&](std::size_t i) { return flux_mass(spec, radii[i], lquad); });
  s.fit = extrapolate(s.radii, s.values, two_term);
  return s;
}

namespace {

VectorSeries finish_vector(VectorSeries s, bool two_term) {
  for (int k = 0; k < 3; ++k) {
    std::vector<double> v(s.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.values[i][k];
    s.fit[k] = extrapolate(s.radii, v, two_term);
  }
  return s;
}

}  // namespace

VectorSeries center_series(const MetricSpec& spec, const std::vector<double>& radii, int lquad, bool two_term) {
  VectorSeries s;
  s.radii = radii;
  s.values = parallel_map(radii.size(), [&](std::size_t i) { return flux_center(spec, radii[i], lquad); });
  return finish_vector(std::move(s), two_term);
}

std::string to_string(DeficitKind k) {
  switch (k) {
    case DeficitKind::J32: return "J32";
    case DeficitKind::J31: return "J31";
    case DeficitKind::J21: return "J21";
    case DeficitKind::RelJ32: return "RelJ32";
  }
  return "?";
}

DeficitKind deficit_from_string(const std::string& s) {
  if (s == "J32" || s == "j32") return DeficitKind::J32;
  if (s == "J31" || s == "j31") return DeficitKind::J31;
  if (s == "J21" || s == "j21") return DeficitKind::J21;
  if (s == "RelJ32" || s == "relj32" || s == "rel-j32") return DeficitKind::RelJ32;
  fail(ErrorKind::InvalidInput, "unknown deficit kind '" + s + "'");
}

double deficit_value(DeficitKind kind, double r, const Measures& m) {
  const double A = m.area, V = m.volume, M = m.mean;
  switch (kind) {
    case DeficitKind::J32:
      return (2.0 / A) * (V - std::pow(A, 1.5) / (6.0 * std::sqrt(pi)));
    case DeficitKind::J31:
      if (!(M > 0.0)) fail(ErrorKind::Degenerate, "integrated mean curvature is not positive");
      return (4.0 / (3.0 * r * M)) * (V - M * M * M / (3.0 * 128.0 * pi * pi));
    case DeficitKind::J21:
      if (!(M > 0.0)) fail(ErrorKind::Degenerate, "integrated mean curvature is not positive");
      return (1.0 / M) * (A - M * M / (16.0 * pi));
    case DeficitKind::RelJ32:
      return (1.0 / A) * (V - std::pow(A, 1.5) / (3.0 * std::sqrt(2.0) * std::sqrt(pi)));
  }
  return 0.0;
}

double deficit(const MetricSpec& spec, DeficitKind kind, double r, int lquad, std::optional<double> r0) {
  validate(spec);
  const bool rel = kind == DeficitKind::RelJ32;
  if (rel != spec.half())
    fail(ErrorKind::InvalidInput, "deficit " + to_string(kind) + " incompatible with family " + to_string(spec.family));
  const Domain dom = spec.half() ? Domain::Hemisphere : Domain::Sphere;
  auto grid = make_grid(dom, lquad);
  auto s = round_surface(Vector3d::Zero(), r, dom);
  auto m = measures(spec, s, grid, r0);
  return deficit_value(kind, r, m);
}

ScalarSeries deficit_series(const MetricSpec& spec, DeficitKind kind, const std::vector<double>& radii, int lquad,
                            std::optional<double> r0, bool two_term) {
  ScalarSeries s;
  s.radii = radii;
  s.values = parallel_map(radii.size(), [&](std::size_t i) { return deficit(spec, kind, radii[i], lquad, r0); });
  s.fit = extrapolate(s.radii, s.values, two_term);
  return s;
}

std::array<double, 3> small_sphere_ratios(SpaceForm model, double r) {
  double A, V, M;
  if (model == SpaceForm::S3) {
    A = 4 * pi * std::sin(r) * std::sin(r);
    V = pi * (2 * r - std::sin(2 * r));
    M = 8 * pi * std::sin(r) * std::cos(r);
  } else {
    A = 4 * pi * std::sinh(r) * std::sinh(r);
    V = pi * (std::sinh(2 * r) - 2 * r);
    M = 8 * pi * std::sinh(r) * std::cosh(r);
  }
  const double I32 = 6 * std::sqrt(pi), I31 = 384 * pi * pi, I21 = 16 * pi;
  return {std::pow(A, 1.5) / V / I32, M * M * M / V / I31, M * M / A / I21};
}

SmallSphere small_sphere(SpaceForm model) {
  const double R = model == SpaceForm::S3 ? 6.0 : -6.0;
  std::vector<double> rs;
  for (int k = 1; k <= 10; ++k) rs.push_back(0.04 * k);
  std::array<std::vector<double>, 3> y;
  for (double r : rs) {
    auto q = small_sphere_ratios(model, r);
    for (int k = 0; k < 3; ++k) y[k].push_back((1.0 - q[k]) / (R * r * r));
  }
  // y = c + d r^2 + e r^4
  Eigen::MatrixXd A(rs.size(), 3);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = rs[i] * rs[i];
    A(i, 2) = std::pow(rs[i], 4);
  }
  SmallSphere out;
  double* dst[3] = {&out.c32, &out.c31, &out.c21};
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(y[k].data(), y[k].size());
    *dst[k] = A.colPivHouseholderQr().solve(b)[0];
  }
  return out;
}

Vector2d center_from_H(const MetricSpec& spec, double r, double mass, int lquad) {
  if (!spec.half()) fail(ErrorKind::InvalidInput, "center_from_H needs a half-space family");
  if (std::abs(mass) < 1e-300) fail(ErrorKind::Degenerate, "zero mass");
  auto grid = make_grid(Domain::Hemisphere, lquad);
  auto s = round_surface(Vector3d::Zero(), r, Domain::Hemisphere);
  auto d = extrinsic(spec, s, grid, CurvatureLevel::First);
  std::vector<double> f1(grid.size()), f2(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const auto& n = d.nodes[i];
    f1[i] = n.x[0] * n.H * n.dA_flat;
    f2[i] = n.x[1] * n.H * n.dA_flat;
  }
  return Vector2d(integrate(grid, f1), integrate(grid, f2)) * (-1.0 / (8.0 * pi * mass));
}

VectorSeries center_from_H_series(const MetricSpec& spec, const std::vector<double>& radii, int lquad,
                                  bool two_term) {
  VectorSeries s;
  s.radii = radii;
  s.values = parallel_map(radii.size(), [&](std::size_t i) {
    double m = flux_mass(spec, radii[i], lquad);
    Vector2d c = center_from_H(spec, radii[i], m, lquad);
    return Vector3d(c[0], c[1], 0.0);
  });
  return finish_vector(std::move(s), two_term);
}

}  // namespace asymflat
