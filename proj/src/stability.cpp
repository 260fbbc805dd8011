#include "asymflat/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "asymflat/extrapolate.hpp"
#include "asymflat/parallel.hpp"

namespace asymflat {

std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::CMCJacobi: return "cmc";
    case OperatorKind::TildeKJacobi: return "tilde-k";
    case OperatorKind::Laplacian: return "laplacian";
  }
  return "?";
}

OperatorKind operator_from_string(const std::string& s) {
  if (s == "cmc" || s == "CMCJacobi") return OperatorKind::CMCJacobi;
  if (s == "tilde-k" || s == "TildeKJacobi") return OperatorKind::TildeKJacobi;
  if (s == "laplacian" || s == "Laplacian") return OperatorKind::Laplacian;
  fail(ErrorKind::InvalidInput, "unknown operator '" + s + "'");
}

OperatorMatrix assemble(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid, OperatorKind kind,
                        int L, BoundaryCondition bc) {
  if (bc == BoundaryCondition::Robin && grid.domain != Domain::Hemisphere)
    fail(ErrorKind::InvalidInput, "Robin condition needs a hemisphere surface");
  if (L < 0) fail(ErrorKind::InvalidInput, "basis degree must be nonnegative");
  const CurvatureLevel level = kind == OperatorKind::TildeKJacobi ? CurvatureLevel::Full
                               : kind == OperatorKind::CMCJacobi  ? CurvatureLevel::Ricci
                                                                  : CurvatureLevel::First;
  const ExtrinsicData d = extrinsic(spec, s, grid, level);
  const HarmonicTable t = make_table(grid, L);
  const int n = grid.size();

  OperatorMatrix op;
  op.kind = kind;
  op.bc = bc;
  op.domain = grid.domain;
  op.L = L;
  op.basis = t.basis;
  op.min_pi = INFINITY;

  Eigen::VectorXd w(n), m00(n), m01(n), m10(n), m11(n), pot(n);
  for (int i = 0; i < n; ++i) {
    const NodeGeometry& g = d.nodes[i];
    w[i] = grid.weight[i] * g.dA;
    Matrix2d M = g.hinv;
    pot[i] = 0.0;
    if (kind == OperatorKind::CMCJacobi) {
      pot[i] = g.W2 + g.ric_nn;
    } else if (kind == OperatorKind::TildeKJacobi) {
      M = g.Pi * g.hinv;
      pot[i] = g.H * g.K + 0.5 * g.nabla_ric_nnn + g.tr_pi_riem;
      const double disc = std::sqrt(std::max(0.0, 0.25 * g.H * g.H - g.K));
      op.min_pi = std::min(op.min_pi, 0.5 * g.H - disc);
    }
    m00[i] = w[i] * M(0, 0);
    m01[i] = w[i] * M(0, 1);
    m10[i] = w[i] * M(1, 0);
    m11[i] = w[i] * M(1, 1);
  }
  if (kind == OperatorKind::TildeKJacobi && !(op.min_pi > 0.0))
    fail(ErrorKind::Degenerate, "Newton tensor not positive definite: K~ Jacobi operator not elliptic");

  const Eigen::MatrixXd& Y = t.y;
  const Eigen::MatrixXd& Yt = t.yt;
  const Eigen::MatrixXd& Yp = t.yp;
  op.A = Yt.transpose() * m00.asDiagonal() * Yt + Yt.transpose() * m01.asDiagonal() * Yp +
         Yp.transpose() * m10.asDiagonal() * Yt + Yp.transpose() * m11.asDiagonal() * Yp;
  if (kind != OperatorKind::Laplacian) op.A -= Y.transpose() * (w.array() * pot.array()).matrix().asDiagonal() * Y;
  op.B = Y.transpose() * w.asDiagonal() * Y;
  op.integrals = Y.transpose() * w;

  if (bc == BoundaryCondition::Robin) {
    const int nb = static_cast<int>(d.boundary.size());
    Eigen::VectorXd wk(nb);
    for (int j = 0; j < nb; ++j) wk[j] = grid.equator_weight() * d.boundary[j].ds * d.boundary[j].kappa;
    op.A -= t.ey.transpose() * wk.asDiagonal() * t.ey;
  }
  const double an = op.A.norm();
  op.symmetry_defect = an > 0.0 ? (op.A - op.A.transpose()).norm() / an : 0.0;
  return op;
}

SpectrumResult spectrum(const OperatorMatrix& op, int k) {
  const int n = static_cast<int>(op.A.rows());
  if (k < 1 || k > n) fail(ErrorKind::InvalidInput, "requested eigenvalue count exceeds the basis size");
  const Eigen::MatrixXd A = 0.5 * (op.A + op.A.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, op.B);
  if (es.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "generalized eigensolver failed");
  SpectrumResult r;
  r.values = es.eigenvalues().head(k);
  r.vectors = es.eigenvectors().leftCols(k);

  if (n < 2) fail(ErrorKind::InvalidInput, "constrained spectrum needs at least two basis functions");
  // orthogonal complement of the mean functional
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(op.integrals);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Z = Q.rightCols(n - 1);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> cs(Z.transpose() * A * Z, Z.transpose() * op.B * Z);
  if (cs.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "constrained eigensolver failed");
  r.constrained = cs.eigenvalues()[0];
  r.constrained_vector = Z * cs.eigenvectors().col(0);
  return r;
}

double quadratic_form(const OperatorMatrix& op, const Eigen::VectorXd& c) { return c.dot(op.A * c); }

SpectrumSweep leaf_spectra(const MetricSpec& spec, const std::vector<LeafResult>& leaves, int L, int k, int lquad) {
  if (leaves.empty()) fail(ErrorKind::InvalidInput, "no leaves to analyze");
  SpectrumSweep out;
  const bool half = leaves.front().surface.domain == Domain::Hemisphere;
  out.kind = half ? OperatorKind::CMCJacobi : OperatorKind::TildeKJacobi;
  out.bc = half ? BoundaryCondition::Robin : BoundaryCondition::None;
  out.lowest_power = half ? 2 : 3;
  out.constrained_power = half ? 3 : 4;
  const SphereGrid grid = make_grid(half ? Domain::Hemisphere : Domain::Sphere, lquad);
  out.leaves = parallel_map(leaves.size(), [&](std::size_t i) {
    const auto& leaf = leaves[i];
    if ((leaf.surface.domain == Domain::Hemisphere) != half) fail(ErrorKind::InvalidInput, "mixed leaf domains");
    const OperatorMatrix op = assemble(spec, leaf.surface, grid, out.kind, L, out.bc);
    const SpectrumResult sp = spectrum(op, k);
    LeafSpectrum ls;
    ls.rho = leaf.surface.rho;
    ls.values = sp.values;
    ls.constrained = sp.constrained;
    ls.min_pi = op.min_pi;
    ls.symmetry_defect = op.symmetry_defect;
    return ls;
  });
  if (leaves.size() >= 2) {
    std::vector<double> r, lo, co;
    for (const auto& l : out.leaves) {
      r.push_back(l.rho);
      lo.push_back(l.values[0]);
      co.push_back(l.constrained);
    }
    const int n = std::min<int>(3, static_cast<int>(r.size()));
    out.lowest_fit = fit_inverse_powers(r, lo, out.lowest_power, n);
    out.constrained_fit = fit_inverse_powers(r, co, out.constrained_power, n);
  }
  return out;
}

namespace {

Matrix3d metric_at(const MetricSpec& spec, const Vector3d& x) {
  auto comp = metric_components<0>(spec, x);
  Matrix3d g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = comp[detail::sym_index(i, j)].value();
  return g;
}

GraphSurface shifted(const GraphSurface& s, const Eigen::VectorXd& u, double t) {
  GraphSurface p = s;
  p.coeffs += (t / s.scale()) * u;
  return p;
}

// errors are measured against scale: |exact|, or the integrand magnitude when that is larger
void finish(VariationTrack& tr, const std::vector<double>& steps, double scale) {
  scale = std::max({std::abs(tr.exact), scale, 1e-300});
  for (double e : tr.estimates) tr.errors.push_back(std::abs(e - tr.exact) / scale);
  const std::size_t n = steps.size();
  const double r = steps[n - 2] / steps[n - 1];
  tr.richardson = (r * r * tr.estimates[n - 1] - tr.estimates[n - 2]) / (r * r - 1.0);
  tr.residual = std::abs(tr.richardson - tr.exact) / scale;
  auto fit = fit_exponent(steps, tr.errors, 1e-13);
  tr.order = fit.exact ? INFINITY : fit.exponent;
}

}  // namespace

VariationReport variation_check(const MetricSpec& spec, const GraphSurface& surf, const SphereGrid& grid,
                                const Eigen::VectorXd& u, const std::vector<double>& steps) {
  if (steps.size() < 2) fail(ErrorKind::InvalidInput, "variation check needs at least two steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i] > 1e-10 * surf.rho)) fail(ErrorKind::InvalidInput, "step underflow");
    if (i > 0 && !(steps[i] < steps[i - 1])) fail(ErrorKind::InvalidInput, "steps must decrease");
  }
  const int Lu = sh_degree(static_cast<int>(u.size()) - 1);
  if (u.size() != sh_count(Lu)) fail(ErrorKind::InvalidInput, "variation coefficients have a partial degree");
  const bool hemi = grid.domain == Domain::Hemisphere;
  GraphSurface s = surf;
  const int Lb = std::max(s.lmax, Lu);
  s.resize(Lb);
  Eigen::VectorXd up = Eigen::VectorXd::Zero(sh_count(Lb));
  up.head(u.size()) = u;

  const ExtrinsicData d = extrinsic(spec, s, grid, CurvatureLevel::Ricci);
  const HarmonicTable full = make_table(grid, Lb, true);
  const int n = grid.size();
  const Eigen::VectorXd U = full.y * up;
  std::vector<double> f(n), Hf(n), Kf(n), H(n), one(n, 1.0), absHf(n), absKf(n);
  for (int i = 0; i < n; ++i) {
    const NodeGeometry& g = d.nodes[i];
    const Vector3d xh = (g.x - s.center).normalized();
    f[i] = U[i] * xh.dot(metric_at(spec, g.x) * g.nu);
    Hf[i] = g.H * f[i];
    Kf[i] = 2.0 * (g.K - 0.5 * g.ric_nn) * f[i];
    H[i] = g.H;
    absHf[i] = std::abs(Hf[i]);
    absKf[i] = std::abs(Kf[i]);
  }

  VariationReport rep;
  rep.steps = steps;
  rep.area.valid = true;
  rep.area.exact = surface_integral(grid, d, Hf);
  double area_scale = surface_integral(grid, d, absHf), second_scale = 0.0;
  if (hemi) {
    const Eigen::VectorXd Ue = full.ey * up;
    std::vector<double> b(d.boundary.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
      const BoundaryNode& bn = d.boundary[j];
      const Vector3d xh = (bn.g.x - s.center).normalized();
      b[j] = Ue[j] * xh.dot(metric_at(spec, bn.g.x) * bn.mu);
    }
    rep.area.exact += boundary_integral(grid, d, b);
    for (double& v : b) v = std::abs(v);
    area_scale += boundary_integral(grid, d, b);
  }
  rep.mean.valid = !hemi;
  if (rep.mean.valid) rep.mean.exact = surface_integral(grid, d, Kf);

  const double area0 = surface_integral(grid, d, one);
  const double H0 = surface_integral(grid, d, H) / area0;
  double spread = 0.0;
  for (double h : H) spread = std::max(spread, std::abs(h - H0));
  rep.second.valid = spread <= 1e-8 * std::abs(H0);
  const double r0 = default_r0(spec);
  if (rep.second.valid) {
    const int Lf = std::max(2, std::min(Lb + Lu + 4, grid.lquad / 2));
    OperatorMatrix op = assemble(spec, s, grid, OperatorKind::CMCJacobi, Lf,
                                 hemi ? BoundaryCondition::Robin : BoundaryCondition::None);
    const HarmonicTable t = make_table(grid, Lf);
    Eigen::VectorXd rhs(t.size());
    std::vector<double> prod(n);
    for (int b = 0; b < t.size(); ++b) {
      for (int i = 0; i < n; ++i) prod[i] = t.y(i, b) * f[i];
      rhs[b] = surface_integral(grid, d, prod);
    }
    Eigen::VectorXd c = op.B.ldlt().solve(rhs);
    rep.second.exact = quadratic_form(op, c);
    second_scale = c.dot(op.B * c) / (s.rho * s.rho);
  }

  auto functionals = [&](double t) {
    GraphSurface p = shifted(s, up, t);
    ExtrinsicData e = extrinsic(spec, p, grid, CurvatureLevel::First);
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = e.nodes[i].H;
    std::array<double, 3> out{surface_integral(grid, e, one), surface_integral(grid, e, h), 0.0};
    if (rep.second.valid) out[2] = out[0] - H0 * enclosed_volume(spec, p, grid, r0);
    return out;
  };
  const auto f0 = functionals(0.0);
  for (double t : steps) {
    const auto fp = functionals(t), fm = functionals(-t);
    rep.area.estimates.push_back((fp[0] - fm[0]) / (2.0 * t));
    rep.mean.estimates.push_back((fp[1] - fm[1]) / (2.0 * t));
    rep.second.estimates.push_back((fp[2] - 2.0 * f0[2] + fm[2]) / (t * t));
  }
  finish(rep.area, steps, area_scale);
  if (rep.mean.valid) finish(rep.mean, steps, surface_integral(grid, d, absKf));
  if (rep.second.valid) finish(rep.second, steps, second_scale);
  return rep;
}

ReillyResult reilly_check(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid,
                          const Eigen::VectorXd& f) {
  if (grid.domain != Domain::Hemisphere || s.domain != Domain::Hemisphere)
    fail(ErrorKind::InvalidInput, "Reilly check needs a hemisphere surface");
  const int Lf = sh_degree(static_cast<int>(f.size()) - 1);
  if (f.size() != sh_count(Lf)) fail(ErrorKind::InvalidInput, "function coefficients have a partial degree");
  const ExtrinsicData d = extrinsic(spec, s, grid, CurvatureLevel::Ricci);
  const HarmonicTable t = make_table(grid, Lf, true);
  const Eigen::VectorXd F = t.y * f, Ft = t.yt * f, Fp = t.yp * f, Ftt = t.ytt * f, Ftp = t.ytp * f,
                        Fpp = t.ypp * f;
  const int n = grid.size();
  std::vector<double> lhs(n), kg(n);
  for (int i = 0; i < n; ++i) {
    const NodeGeometry& g = d.nodes[i];
    const Vector2d df(Ft[i], Fp[i]);
    Matrix2d hess;
    hess << Ftt[i], Ftp[i], Ftp[i], Fpp[i];
    for (int A = 0; A < 2; ++A)
      for (int B = 0; B < 2; ++B) hess(A, B) -= g.hgamma[0](A, B) * df[0] + g.hgamma[1](A, B) * df[1];
    const Matrix2d mixed = g.hinv * hess;
    const double lap = mixed.trace();
    lhs[i] = lap * lap - (mixed * mixed).trace();
    kg[i] = g.KG * df.dot(g.hinv * df);
  }
  const Eigen::VectorXd E = t.ey * f, Et = t.eyt * f, Ep = t.eyp * f, Epp = t.eypp * f;
  std::vector<double> bd(d.boundary.size());
  for (std::size_t j = 0; j < bd.size(); ++j) {
    const BoundaryNode& b = d.boundary[j];
    const Matrix2d& hi = b.g.hinv;
    const double fmu = (hi(0, 0) * Et[j] + hi(1, 0) * Ep[j]) / std::sqrt(hi(0, 0));
    const double ds = b.ds;
    const double lap_b = Epp[j] / (ds * ds) - Ep[j] * b.dsds_phi / (ds * ds * ds);
    const double grad_b2 = Ep[j] * Ep[j] / (ds * ds);
    bd[j] = 2.0 * fmu * lap_b + b.kappa_g * (fmu * fmu + grad_b2);
  }
  ReillyResult r;
  r.lhs = surface_integral(grid, d, lhs);
  r.rhs = surface_integral(grid, d, kg) + boundary_integral(grid, d, bd);
  r.gap = std::abs(r.lhs - r.rhs);
  const double big = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.degenerate = big <= 1e-12;
  r.relative = r.degenerate ? r.gap : r.gap / big;
  return r;
}

}  // namespace asymflat
