#include "asymflat/metric.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace asymflat {

std::string to_string(Family f) {
  switch (f) {
    case Family::Flat: return "flat";
    case Family::Schwarzschild: return "schwarzschild";
    case Family::EpsAS: return "eps-as";
    case Family::HalfSchwarzschild: return "half-schwarzschild";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  // case and separators are ignored: "HalfSchwarzschild", "half-schwarzschild"
  std::string k;
  for (char ch : s)
    if (ch != '-' && ch != '_') k += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (k == "flat") return Family::Flat;
  if (k == "schwarzschild") return Family::Schwarzschild;
  if (k == "epsas") return Family::EpsAS;
  if (k == "halfschwarzschild") return Family::HalfSchwarzschild;
  fail(ErrorKind::InvalidSpec, "unknown metric family '" + s + "'");
}

double MetricSpec::rmin() const {
  if (r_min) return *r_min;
  if (family == Family::Flat) return 1e-3;
  return std::max(4.0 * std::abs(m), 1.0);
}

MetricSpec flat_spec() { return MetricSpec{}; }

MetricSpec schwarzschild_spec(double m, const Vector3d& c) {
  MetricSpec s;
  s.family = Family::Schwarzschild;
  s.m = m;
  s.c = c;
  return s;
}

MetricSpec half_schwarzschild_spec(double m, const Vector3d& c) {
  MetricSpec s = schwarzschild_spec(m, c);
  s.family = Family::HalfSchwarzschild;
  return s;
}

MetricSpec eps_as_spec(double m, const Vector3d& c, double gamma1, double gamma2, double epsilon) {
  MetricSpec s;
  s.family = Family::EpsAS;
  s.m = m;
  s.c = c;
  s.gamma1 = gamma1;
  s.gamma2 = gamma2;
  s.epsilon = epsilon;
  return s;
}

void validate(const MetricSpec& spec) {
  auto bad = [](const std::string& w) { fail(ErrorKind::InvalidSpec, w); };
  if (!std::isfinite(spec.m) || !spec.c.allFinite()) bad("non-finite mass or center");
  if (spec.r_min && !(*spec.r_min > 0.0)) bad("r_min must be positive");
  if (spec.tau <= 0.5 || spec.tau > 1.0) bad("tau must lie in (1/2, 1]");
  if (spec.sigma <= 0.0) bad("sigma must be positive");
  if (spec.epsilon && *spec.epsilon < 0.0) bad("epsilon must be non-negative");
  if (spec.family == Family::Flat) {
    if (spec.m != 0.0) bad("flat family has zero mass");
    if (!spec.perturbation.empty()) bad("flat family takes no perturbation");
  }
  if (spec.family == Family::HalfSchwarzschild && spec.c[2] != 0.0)
    bad("half-Schwarzschild center must lie on the boundary plane");
  for (const auto& t : spec.perturbation) {
    if (t.i < 0 || t.i > 2 || t.j < 0 || t.j > 2) bad("perturbation index out of range");
    if (t.powers[0] < 0 || t.powers[1] < 0 || t.powers[2] < 0) bad("negative perturbation power");
    if (!std::isfinite(t.coeff)) bad("non-finite perturbation coefficient");
    if (t.decay < 2.0) bad("perturbation decay must be at least 2");
    if (spec.family == Family::EpsAS && spec.epsilon && t.decay < 2.0 + *spec.epsilon - 1e-12)
      bad("perturbation decays slower than the declared epsilon");
  }
}

bool in_domain(const MetricSpec& spec, const Vector3d& x) {
  const double rm = spec.rmin();
  if (!x.allFinite()) return false;
  if ((x - spec.c).norm() < rm) return false;
  if (x.norm() < rm) return false;
  if (spec.half() && x[2] < -1e-12 * std::max(1.0, x.norm())) return false;
  return true;
}

void check_domain(const MetricSpec& spec, const Vector3d& x) {
  if (in_domain(spec, x)) return;
  std::ostringstream os;
  os << "point (" << x[0] << ", " << x[1] << ", " << x[2] << ") outside the metric domain";
  if (spec.half() && x[2] < 0) os << " (below the boundary plane)";
  else os << " (inside r_min = " << spec.rmin() << ")";
  fail(ErrorKind::OutsideDomain, os.str());
}

bool reflection_even(const MetricSpec& spec) {
  if (spec.c[2] != 0.0 && spec.family != Family::Flat) return false;
  for (const auto& t : spec.perturbation) {
    int n3 = (t.i == 2) + (t.j == 2);
    if ((t.powers[2] + n3) % 2 != 0) return false;
  }
  return true;
}

EpsData eps_data(const MetricSpec& spec) {
  switch (spec.family) {
    case Family::Flat:
      return {0.0, Vector3d::Zero(), 0.0, 0.0, spec.epsilon.value_or(1.0)};
    case Family::Schwarzschild:
    case Family::HalfSchwarzschild: {
      double eps = 1.0;
      for (const auto& t : spec.perturbation) eps = std::min(eps, t.decay - 2.0);
      if (spec.epsilon) eps = std::min(eps, *spec.epsilon);
      return {spec.m, spec.c, 2.0 * spec.m, 1.5 * spec.m * spec.m, eps};
    }
    case Family::EpsAS:
      if (!spec.epsilon) fail(ErrorKind::InvalidSpec, "eps-as spec lacks an epsilon declaration");
      return {spec.m, spec.c, spec.gamma1, spec.gamma2, *spec.epsilon};
  }
  return {};
}

namespace {

template <int N>
void fill_jet(const std::array<Jet<N>, 6>& comp, MetricJet& out) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto& J = comp[detail::sym_index(i, j)];
      out.g(i, j) = J.value();
      for (int k = 0; k < 3; ++k) {
        int a[3] = {0, 0, 0};
        a[k] += 1;
        out.dg[k](i, j) = J.d(a[0], a[1], a[2]);
        for (int l = 0; l < 3; ++l) {
          int b[3] = {a[0], a[1], a[2]};
          b[l] += 1;
          out.ddg[k][l](i, j) = J.d(b[0], b[1], b[2]);
          for (int n = 0; n < 3; ++n) {
            int e[3] = {b[0], b[1], b[2]};
            e[n] += 1;
            out.dddg[k][l][n](i, j) = J.d(e[0], e[1], e[2]);
          }
        }
      }
    }
}

template <int N>
using JetMat = std::array<std::array<Jet<N>, 3>, 3>;

template <int N>
JetMat<N> full(const std::array<Jet<N>, 6>& s) {
  JetMat<N> g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g[i][j] = s[detail::sym_index(i, j)];
  return g;
}

template <int N>
JetMat<N> inverse(const JetMat<N>& g) {
  JetMat<N> adj;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
      adj[i][j] = g[i1][j1] * g[i2][j2] - g[i1][j2] * g[i2][j1];
    }
  Jet<N> det = g[0][0] * adj[0][0] + g[0][1] * adj[1][0] + g[0][2] * adj[2][0];
  Jet<N> di = reciprocal(det);
  for (auto& row : adj)
    for (auto& v : row) v = v * di;
  return adj;
}

// Gamma^k_ij as order N-1 jets
template <int N>
std::array<JetMat<N - 1>, 3> christoffel_jets(const std::array<Jet<N>, 6>& comp) {
  constexpr int M = N - 1;
  JetMat<N> g = full(comp);
  JetMat<M> gl;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gl[i][j] = g[i][j].template truncate<M>();
  JetMat<M> gi = inverse(gl);
  std::array<JetMat<M>, 3> dg;  // dg[k][i][j]
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        dg[k][i][j] = g[i][j].diff(k);
        dg[k][j][i] = dg[k][i][j];
      }
  std::array<JetMat<M>, 3> low;  // Gamma_{l,ij}
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        low[l][i][j] = 0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
        low[l][j][i] = low[l][i][j];
      }
  std::array<JetMat<M>, 3> G;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        Jet<M> s(0.0);
        for (int l = 0; l < 3; ++l) s += gi[k][l] * low[l][i][j];
        G[k][i][j] = s;
        G[k][j][i] = s;
      }
  return G;
}

template <int N>
Curvature curvature_impl(const std::array<Jet<N>, 6>& comp) {
  static_assert(N >= 2);
  constexpr int M = N - 1;
  constexpr int Q = N - 2;
  Curvature cv;
  auto G = christoffel_jets<N>(comp);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cv.g(i, j) = comp[detail::sym_index(i, j)].value();
  cv.ginv = cv.g.inverse();
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cv.gamma[k](i, j) = G[k][i][j].value();

  std::array<JetMat<Q>, 3> Gq;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) Gq[k][i][j] = G[k][i][j].template truncate<Q>();
  std::array<Jet<Q>, 3> trace;  // Gamma^k_kl
  for (int l = 0; l < 3; ++l) trace[l] = Gq[0][0][l] + Gq[1][1][l] + Gq[2][2][l];

  JetMat<Q> ric;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Jet<Q> s(0.0);
      for (int k = 0; k < 3; ++k) {
        s += G[k][i][j].diff(k);
        s -= G[k][i][k].diff(j);
        s += trace[k] * Gq[k][i][j];
        for (int l = 0; l < 3; ++l) s -= Gq[k][j][l] * Gq[l][i][k];
      }
      ric[i][j] = s;
      ric[j][i] = s;
    }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cv.ricci(i, j) = ric[i][j].value();
  cv.scalar = (cv.ginv.cwiseProduct(cv.ricci)).sum();
  for (int k = 0; k < 3; ++k) cv.nabla_ricci[k].setZero();
  if constexpr (Q >= 1) {
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double v = ric[i][j].grad(k);
          for (int l = 0; l < 3; ++l)
            v -= cv.gamma[l](k, i) * cv.ricci(l, j) + cv.gamma[l](k, j) * cv.ricci(i, l);
          cv.nabla_ricci[k](i, j) = v;
        }
  }
  (void)M;
  return cv;
}

}  // namespace

MetricJet eval_jet(const MetricSpec& spec, const Vector3d& x) {
  MetricJet out;
  fill_jet<3>(metric_components<3>(spec, x), out);
  return out;
}

MetricJet deviation_jet(const MetricSpec& spec, const Vector3d& x, Reference ref) {
  auto comp = metric_components<3>(spec, x);
  Jet<3> base(1.0);
  if (ref == Reference::ConformalSchwarzschild) {
    auto X = detail::coords<3>(x);
    base = 1.0 + (2.0 * spec.m) * reciprocal(detail::radius(X));
  }
  comp[0] -= base;
  comp[3] -= base;
  comp[5] -= base;
  MetricJet out;
  fill_jet<3>(comp, out);
  return out;
}

Curvature curvature(const MetricSpec& spec, const Vector3d& x, bool with_derivative) {
  if (with_derivative) return curvature_impl<3>(metric_components<3>(spec, x));
  return curvature_impl<2>(metric_components<2>(spec, x));
}

std::array<Matrix3d, 3> christoffel(const MetricSpec& spec, const Vector3d& x, Matrix3d* g) {
  auto comp = metric_components<1>(spec, x);
  auto G = christoffel_jets<1>(comp);
  std::array<Matrix3d, 3> out;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[k](i, j) = G[k][i][j].value();
  if (g)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) (*g)(i, j) = comp[detail::sym_index(i, j)].value();
  return out;
}

double riemann(const Curvature& cv, int i, int j, int k, int l) {
  // three dimensions: Rm = P (KN) g with P = Ric - R/4 g
  Matrix3d P = cv.ricci - 0.25 * cv.scalar * cv.g;
  const Matrix3d& g = cv.g;
  return P(i, l) * g(j, k) + P(j, k) * g(i, l) - P(i, k) * g(j, l) - P(j, l) * g(i, k);
}

Matrix3d Curvature::riem_nu(const Vector3d& nu) const {
  Matrix3d P = ricci - 0.25 * scalar * g;
  Vector3d gn = g * nu, pn = P * nu;
  double nn = nu.dot(gn), pnn = nu.dot(pn);
  return P * nn + pnn * g - pn * gn.transpose() - gn * pn.transpose();
}

double Curvature::nabla_ric(const Vector3d& v) const {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += v[k] * v.dot(nabla_ricci[k] * v);
  return s;
}

}  // namespace asymflat
