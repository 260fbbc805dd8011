#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asymflat/error.hpp"
#include "asymflat/jet.hpp"

namespace asymflat {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

enum class Family { Flat, Schwarzschild, EpsAS, HalfSchwarzschild };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

// coeff * (x1/r)^p1 (x2/r)^p2 (x3/r)^p3 * r^-decay added to g_ij (= g_ji)
struct PerturbationTerm {
  int i = 0;
  int j = 0;
  double coeff = 0.0;
  std::array<int, 3> powers{0, 0, 0};
  double decay = 3.0;
};

struct MetricSpec {
  Family family = Family::Flat;
  double m = 0.0;
  Vector3d c = Vector3d::Zero();
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::optional<double> epsilon;
  std::vector<PerturbationTerm> perturbation;
  double tau = 1.0;
  double sigma = 1.0;
  std::optional<double> r_min;

  double rmin() const;
  bool half() const { return family == Family::HalfSchwarzschild; }
};

MetricSpec flat_spec();
MetricSpec schwarzschild_spec(double m, const Vector3d& c = Vector3d::Zero());
MetricSpec half_schwarzschild_spec(double m, const Vector3d& c = Vector3d::Zero());
MetricSpec eps_as_spec(double m, const Vector3d& c, double gamma1, double gamma2, double epsilon);

void validate(const MetricSpec& spec);
bool in_domain(const MetricSpec& spec, const Vector3d& x);
void check_domain(const MetricSpec& spec, const Vector3d& x);

// metric invariant under x3 -> -x3 (with the matching sign flips)
bool reflection_even(const MetricSpec& spec);

// leading asymptotic data of g ~ f delta with f = 1 + 2m/r + g1 c.x/r^3 + g2/r^2
struct EpsData {
  double m;
  Vector3d c;
  double gamma1;
  double gamma2;
  double epsilon;
};
EpsData eps_data(const MetricSpec& spec);

namespace detail {

inline int sym_index(int i, int j) {
  if (i > j) std::swap(i, j);
  static constexpr int t[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return t[i][j];
}

template <int N>
std::array<Jet<N>, 3> coords(const Vector3d& x) {
  return {Jet<N>::variable(0, x[0]), Jet<N>::variable(1, x[1]), Jet<N>::variable(2, x[2])};
}

template <int N>
Jet<N> radius(const std::array<Jet<N>, 3>& X, const Vector3d& c = Vector3d::Zero()) {
  Jet<N> s(0.0);
  for (int i = 0; i < 3; ++i) {
    Jet<N> d = X[i] - c[i];
    s += d * d;
  }
  return sqrt(s);
}

template <int N>
Jet<N> perturbation_jet(const PerturbationTerm& t, const std::array<Jet<N>, 3>& X, const Jet<N>& r,
                        const Jet<N>& rinv) {
  Jet<N> v(t.coeff);
  int total = 0;
  for (int k = 0; k < 3; ++k) {
    v = v * ipow(X[k], t.powers[k]);
    total += t.powers[k];
  }
  return v * ipow(rinv, total) * pow(r, -t.decay);
}

}  // namespace detail

// metric components g_00 g_01 g_02 g_11 g_12 g_22 as order-N jets at x
template <int N>
std::array<Jet<N>, 6> metric_components(const MetricSpec& spec, const Vector3d& x) {
  check_domain(spec, x);
  std::array<Jet<N>, 6> g;
  for (auto& v : g) v = Jet<N>(0.0);
  auto X = detail::coords<N>(x);
  Jet<N> psi(1.0);
  switch (spec.family) {
    case Family::Flat:
      break;
    case Family::Schwarzschild:
    case Family::HalfSchwarzschild: {
      Jet<N> rc = detail::radius(X, spec.c);
      Jet<N> u = 1.0 + (0.5 * spec.m) * reciprocal(rc);
      Jet<N> u2 = u * u;
      psi = u2 * u2;
      break;
    }
    case Family::EpsAS: {
      Jet<N> r = detail::radius(X);
      Jet<N> ri = reciprocal(r);
      Jet<N> cx = X[0] * spec.c[0] + X[1] * spec.c[1] + X[2] * spec.c[2];
      Jet<N> ri2 = ri * ri;
      psi = 1.0 + (2.0 * spec.m) * ri + spec.gamma1 * cx * ri2 * ri + spec.gamma2 * ri2;
      break;
    }
  }
  g[0] = psi;
  g[3] = psi;
  g[5] = psi;
  if (!spec.perturbation.empty()) {
    Jet<N> r = detail::radius(X);
    Jet<N> ri = reciprocal(r);
    for (const auto& t : spec.perturbation) {
      Jet<N> p = detail::perturbation_jet(t, X, r, ri);
      g[detail::sym_index(t.i, t.j)] += p;
    }
  }
  return g;
}

struct MetricJet {
  Matrix3d g = Matrix3d::Zero();
  std::array<Matrix3d, 3> dg{};                                  // dg[k](i,j) = d_k g_ij
  std::array<std::array<Matrix3d, 3>, 3> ddg{};                  // ddg[k][l](i,j)
  std::array<std::array<std::array<Matrix3d, 3>, 3>, 3> dddg{};  // dddg[k][l][n](i,j)
};

MetricJet eval_jet(const MetricSpec& spec, const Vector3d& x);

enum class Reference { Flat, ConformalSchwarzschild };

// g minus the reference: delta, or (1 + 2m/r) delta
MetricJet deviation_jet(const MetricSpec& spec, const Vector3d& x, Reference ref);

struct Curvature {
  Matrix3d g;
  Matrix3d ginv;
  std::array<Matrix3d, 3> gamma;        // gamma[k](i,j) = Gamma^k_ij
  Matrix3d ricci;
  double scalar = 0.0;
  std::array<Matrix3d, 3> nabla_ricci;  // [k](i,j) = (nabla_k Ric)_ij

  // Rm(X, nu, nu, Y) as a bilinear form, nu unit
  Matrix3d riem_nu(const Vector3d& nu) const;
  double ric(const Vector3d& v) const { return v.dot(ricci * v); }
  double nabla_ric(const Vector3d& v) const;
};

// full curvature data; with_derivative=false skips nabla Ric (third jets)
Curvature curvature(const MetricSpec& spec, const Vector3d& x, bool with_derivative = true);

// Christoffel symbols only (first jets)
std::array<Matrix3d, 3> christoffel(const MetricSpec& spec, const Vector3d& x, Matrix3d* g = nullptr);

// Riemann tensor R_ijkl = Rm(e_i, e_j, e_k, e_l), sectional curvature Rm(X,Y,Y,X)
double riemann(const Curvature& cv, int i, int j, int k, int l);

}  // namespace asymflat
