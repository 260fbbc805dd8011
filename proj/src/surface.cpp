#include "asymflat/surface.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace asymflat {

double GraphSurface::scale() const { return std::pow(rho, -theta_exp); }

void GraphSurface::resize(int L) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sh_count(L));
  int n = std::min<int>(c.size(), coeffs.size());
  c.head(n) = coeffs.head(n);
  coeffs = c;
  lmax = L;
}

double GraphSurface::coeff(int l, int m) const {
  int k = sh_index(l, m);
  return k < coeffs.size() ? coeffs[k] : 0.0;
}

GraphSurface round_surface(const Vector3d& center, double rho, Domain domain, int lmax) {
  GraphSurface s;
  s.center = center;
  s.rho = rho;
  s.domain = domain;
  s.lmax = lmax;
  s.coeffs = Eigen::VectorXd::Zero(sh_count(lmax));
  return s;
}

void validate(const GraphSurface& s, bool require_parity) {
  auto bad = [](const std::string& w) { fail(ErrorKind::InvalidInput, w); };
  if (!(s.rho > 0.0) || !std::isfinite(s.rho)) bad("surface radius must be positive");
  if (s.lmax < 0 || s.coeffs.size() != sh_count(s.lmax)) bad("coefficient vector does not match lmax");
  if (!s.coeffs.allFinite() || !s.center.allFinite()) bad("non-finite surface data");
  if (s.domain == Domain::Hemisphere) {
    if (s.center[2] != 0.0) bad("hemisphere center must lie on the boundary plane");
    if (require_parity)
      for (int k = 0; k < s.coeffs.size(); ++k)
        if (s.coeffs[k] != 0.0 && !sh_admissible(Domain::Hemisphere, sh_degree(k), sh_order(k)))
          bad("hemisphere surface has a reflection-odd harmonic");
  }
  // crude sup bound of the graph
  double bound = 0.0;
  for (int k = 0; k < s.coeffs.size(); ++k) {
    int l = sh_degree(k);
    bound += std::abs(s.coeffs[k]) * std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi)) * std::numbers::sqrt2;
  }
  if (bound * s.scale() >= 0.5 * s.rho) bad("graph not embedded: perturbation exceeds rho/2");
}

namespace {

Vector3d gamma_apply(const std::array<Matrix3d, 3>& G, const Vector3d& u, const Vector3d& v) {
  return Vector3d(u.dot(G[0] * v), u.dot(G[1] * v), u.dot(G[2] * v));
}

}  // namespace

NodeGeometry node_geometry(const MetricSpec& spec, const Vector3d& center, double th, double ph, const RadialJet& r,
                           CurvatureLevel level) {
  NodeGeometry n;
  const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
  const Vector3d xh(st * cp, st * sp, ct), et(ct * cp, ct * sp, -st), ep(-sp, cp, 0.0);
  const double R = r.R;
  n.radius = R;
  n.x = center + R * xh;
  n.xt = r.Rt * xh + R * et;
  n.xp = r.Rp * xh + R * st * ep;
  const Vector3d xtt = r.Rtt * xh + 2.0 * r.Rt * et - R * xh;
  const Vector3d xtp = r.Rtp * xh + r.Rp * et + (r.Rt * st + R * ct) * ep;
  const Vector3d xpp = r.Rpp * xh + 2.0 * r.Rp * st * ep - R * st * (st * xh + ct * et);

  Matrix3d g;
  std::array<Matrix3d, 3> G;
  Curvature cv;
  if (level == CurvatureLevel::First) {
    G = christoffel(spec, n.x, &g);
  } else {
    cv = curvature(spec, n.x, level == CurvatureLevel::Full);
    g = cv.g;
    G = cv.gamma;
  }
  const Vector3d Dtt = xtt + gamma_apply(G, n.xt, n.xt);
  const Vector3d Dtp = xtp + gamma_apply(G, n.xt, n.xp);
  const Vector3d Dpp = xpp + gamma_apply(G, n.xp, n.xp);

  const Vector3d gxt = g * n.xt, gxp = g * n.xp;
  n.h << n.xt.dot(gxt), n.xt.dot(gxp), n.xt.dot(gxp), n.xp.dot(gxp);
  n.hinv = n.h.inverse();
  const Vector3d cov = n.xt.cross(n.xp);
  const Matrix3d ginv = g.inverse();
  const Vector3d up = ginv * cov;
  const double norm = std::sqrt(cov.dot(up));
  n.nu = up / norm;
  n.II << -cov.dot(Dtt) / norm, -cov.dot(Dtp) / norm, -cov.dot(Dtp) / norm, -cov.dot(Dpp) / norm;
  n.W = n.hinv * n.II;
  n.H = n.W.trace();
  n.K = n.II.determinant() / n.h.determinant();
  n.W2 = (n.W * n.W).trace();
  n.Pi = n.H * Matrix2d::Identity() - n.W;
  const Vector3d* D[2][2] = {{&Dtt, &Dtp}, {&Dtp, &Dpp}};
  for (int A = 0; A < 2; ++A)
    for (int B = 0; B < 2; ++B) {
      Vector2d low(D[A][B]->dot(gxt), D[A][B]->dot(gxp));
      Vector2d up2 = n.hinv * low;
      n.hgamma[0](A, B) = up2[0];
      n.hgamma[1](A, B) = up2[1];
    }
  n.dA = std::sqrt(n.h.determinant()) / st;
  n.dA_flat = cov.norm() / st;
  if (level != CurvatureLevel::First) {
    n.ric_nn = cv.ric(n.nu);
    n.scalar = cv.scalar;
    n.KG = n.K + 0.5 * n.scalar - n.ric_nn;
  }
  if (level == CurvatureLevel::Full) {
    n.nabla_ric_nnn = cv.nabla_ric(n.nu);
    Eigen::Matrix<double, 3, 2> T;
    T.col(0) = n.xt;
    T.col(1) = n.xp;
    Matrix2d B = T.transpose() * cv.riem_nu(n.nu) * T;
    n.tr_pi_riem = (n.Pi * n.hinv * B).trace();
  }
  return n;
}

namespace {

RadialJet radial_at(const GraphSurface& s, const HarmonicTable& t, bool equator, int row) {
  const double sc = s.scale();
  RadialJet r{s.rho, 0, 0, 0, 0, 0};
  const Eigen::MatrixXd& y = equator ? t.ey : t.y;
  const Eigen::MatrixXd& yt = equator ? t.eyt : t.yt;
  const Eigen::MatrixXd& yp = equator ? t.eyp : t.yp;
  const Eigen::MatrixXd& ytt = equator ? t.eytt : t.ytt;
  const Eigen::MatrixXd& ytp = equator ? t.eytp : t.ytp;
  const Eigen::MatrixXd& ypp = equator ? t.eypp : t.ypp;
  for (int b = 0; b < t.size(); ++b) {
    double c = s.coeffs[t.basis[b]];
    if (c == 0.0) continue;
    c *= sc;
    r.R += c * y(row, b);
    r.Rt += c * yt(row, b);
    r.Rp += c * yp(row, b);
    r.Rtt += c * ytt(row, b);
    r.Rtp += c * ytp(row, b);
    r.Rpp += c * ypp(row, b);
  }
  return r;
}

}  // namespace

ExtrinsicData extrinsic(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid, CurvatureLevel level) {
  if (s.domain != grid.domain) fail(ErrorKind::InvalidInput, "surface and grid domains differ");
  if (s.coeffs.size() != sh_count(s.lmax)) fail(ErrorKind::InvalidInput, "coefficient vector does not match lmax");
  HarmonicTable t = make_table(grid, s.lmax, true);
  ExtrinsicData d;
  d.level = level;
  d.nodes.resize(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    RadialJet r = radial_at(s, t, false, i);
    if (!(r.R > 0.0)) fail(ErrorKind::Degenerate, "radial graph is not positive");
    d.nodes[i] = node_geometry(spec, s.center, grid.theta[grid.ring(i)], grid.phi[grid.column(i)], r, level);
  }
  if (grid.domain == Domain::Hemisphere) {
    d.boundary.resize(grid.nphi);
    for (int j = 0; j < grid.nphi; ++j) {
      RadialJet r = radial_at(s, t, true, j);
      BoundaryNode& b = d.boundary[j];
      b.g = node_geometry(spec, s.center, 0.5 * std::numbers::pi, grid.phi[j], r, level);
      const NodeGeometry& n = b.g;
      const double hpp = n.h(1, 1);
      b.ds = std::sqrt(hpp);
      const double htt_inv = n.hinv(0, 0);
      Vector2d muA(n.hinv(0, 0), n.hinv(1, 0));
      muA /= std::sqrt(htt_inv);
      b.mu = muA[0] * n.xt + muA[1] * n.xp;
      b.kappa_g = -n.hgamma[0](1, 1) / (hpp * std::sqrt(htt_inv));
      Vector2d low = n.h * Vector2d(n.hgamma[0](1, 1), n.hgamma[1](1, 1));
      b.dsds_phi = low[1] / b.ds;
      Matrix3d g;
      auto G = christoffel(spec, n.x, &g);
      Matrix3d ginv = g.inverse();
      const double s33 = std::sqrt(ginv(2, 2));
      b.angle_defect = std::abs(std::asin(std::clamp(n.nu[2] / s33, -1.0, 1.0)));
      b.kappa = n.nu.dot(G[2] * n.nu) / s33;
    }
  }
  return d;
}

double default_r0(const MetricSpec& spec) { return std::max(2.0 * spec.rmin(), 8.0 * std::abs(spec.m)); }

double enclosed_volume(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid, double r0) {
  static const auto gl = [] {
    std::pair<std::vector<double>, std::vector<double>> p;
    gauss_legendre(16, p.first, p.second);
    return p;
  }();
  HarmonicTable t = make_table(grid, s.lmax, true);
  const double sc = s.scale();
  std::vector<double> radial(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    double R = s.rho;
    for (int b = 0; b < t.size(); ++b) R += sc * s.coeffs[t.basis[b]] * t.y(i, b);
    if (R <= r0) fail(ErrorKind::Degenerate, "surface reaches inside the inner volume ball");
    std::vector<double> terms;
    double a = r0;
    while (a < R) {
      double b = std::min(2.0 * a, R);
      if (R - b < 0.25 * (b - a)) b = R;
      double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (std::size_t q = 0; q < gl.first.size(); ++q) {
        double sr = mid + half * gl.first[q];
        Vector3d x = s.center + sr * grid.dir[i];
        auto comp = metric_components<0>(spec, x);
        Matrix3d g;
        for (int p = 0; p < 3; ++p)
          for (int k = 0; k < 3; ++k) g(p, k) = comp[detail::sym_index(p, k)].value();
        terms.push_back(half * gl.second[q] * std::sqrt(g.determinant()) * sr * sr);
      }
      a = b;
    }
    radial[i] = pairwise_sum(terms);
  }
  const double ball = (s.domain == Domain::Hemisphere ? 2.0 : 4.0) * std::numbers::pi * r0 * r0 * r0 / 3.0;
  return ball + integrate(grid, radial);
}

double surface_integral(const SphereGrid& grid, const ExtrinsicData& data, std::span<const double> f) {
  std::vector<double> v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v[i] = f[i] * data.nodes[i].dA;
  return integrate(grid, v);
}

double boundary_integral(const SphereGrid& grid, const ExtrinsicData& data, std::span<const double> f) {
  std::vector<double> v(data.boundary.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f[j] * data.boundary[j].ds * grid.equator_weight();
  return pairwise_sum(v);
}

Measures measures(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid, const ExtrinsicData& data,
                  std::optional<double> r0) {
  Measures m;
  std::vector<double> one(grid.size(), 1.0), H(grid.size());
  for (int i = 0; i < grid.size(); ++i) H[i] = data.nodes[i].H;
  m.area = surface_integral(grid, data, one);
  m.mean = surface_integral(grid, data, H);
  if (!data.boundary.empty()) {
    std::vector<double> b(data.boundary.size(), 1.0);
    m.boundary_length = boundary_integral(grid, data, b);
  }
  m.volume = enclosed_volume(spec, s, grid, r0.value_or(default_r0(spec)));
  return m;
}

Measures measures(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid, std::optional<double> r0) {
  return measures(spec, s, grid, extrinsic(spec, s, grid, CurvatureLevel::First), r0);
}

double free_boundary_defect(const ExtrinsicData& data) {
  if (data.boundary.empty()) fail(ErrorKind::InvalidInput, "free boundary defect needs a hemisphere surface");
  double d = 0.0;
  for (const auto& b : data.boundary) d = std::max(d, b.angle_defect);
  return d;
}

double gauss_bonnet(const SphereGrid& grid, const ExtrinsicData& data) {
  if (data.level == CurvatureLevel::First) fail(ErrorKind::InvalidInput, "Gauss curvature needs Ricci level data");
  std::vector<double> kg(grid.size());
  for (int i = 0; i < grid.size(); ++i) kg[i] = data.nodes[i].KG;
  double total = surface_integral(grid, data, kg);
  if (!data.boundary.empty()) {
    std::vector<double> k(data.boundary.size());
    for (std::size_t j = 0; j < k.size(); ++j) k[j] = data.boundary[j].kappa_g;
    total += boundary_integral(grid, data, k);
  }
  return total;
}

Vector3d euclidean_centroid(const SphereGrid& grid, const ExtrinsicData& data) {
  std::vector<Vector3d> v(grid.size());
  std::vector<double> a(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    v[i] = data.nodes[i].x * data.nodes[i].dA_flat;
    a[i] = data.nodes[i].dA_flat;
  }
  return integrate3(grid, v) / integrate(grid, a);
}

}  // namespace asymflat
