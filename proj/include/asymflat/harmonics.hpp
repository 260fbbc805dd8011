#pragma once

#include <vector>

#include <Eigen/Dense>

#include "asymflat/grid.hpp"

namespace asymflat {

// real orthonormal spherical harmonics; m > 0 is cos(m phi), m < 0 is sin(|m| phi)
inline int sh_index(int l, int m) { return l * l + l + m; }
inline int sh_count(int L) { return (L + 1) * (L + 1); }
inline int sh_degree(int k) {
  int l = 0;
  while ((l + 1) * (l + 1) <= k) ++l;
  return l;
}
inline int sh_order(int k) {
  int l = sh_degree(k);
  return k - l * l - l;
}
// admissible on the hemisphere: even under x3 -> -x3
inline bool sh_admissible(Domain d, int l, int m) {
  return d == Domain::Sphere || ((l + (m < 0 ? -m : m)) % 2 == 0);
}

struct ShPoint {
  Eigen::ArrayXd y, yt, yp, ytt, ytp, ypp;
};

// all harmonics of degree <= L and their theta/phi derivatives up to second order
void sh_eval(int L, double theta, double phi, ShPoint& out);

// tables on a grid for the admissible basis of degree <= L
struct HarmonicTable {
  int L = 0;
  Domain domain = Domain::Sphere;
  std::vector<int> basis;  // sh indices in use
  Eigen::MatrixXd y, yt, yp, ytt, ytp, ypp;  // node x basis
  // equator ring (hemisphere only)
  Eigen::MatrixXd ey, eyt, eyp, eytt, eytp, eypp;

  int size() const { return static_cast<int>(basis.size()); }
};

// full_basis keeps every harmonic, otherwise only the admissible ones
HarmonicTable make_table(const SphereGrid& grid, int L, bool full_basis = false);

// coefficients (full sh layout, size sh_count(L)) of nodal values
Eigen::VectorXd sh_project(const SphereGrid& grid, const HarmonicTable& table, const Eigen::VectorXd& values);

// solve (Delta_1 + 2) u = f coefficient-wise; the l = 1 part of f must vanish
Eigen::VectorXd poisson_solve(const Eigen::VectorXd& f, Domain domain, double tol = 1e-12);

}  // namespace asymflat
