#include "asymflat/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "asymflat/error.hpp"

namespace asymflat {

void sh_eval(int L, double theta, double phi, ShPoint& out) {
  const int n = sh_count(L);
  out.y.setZero(n);
  out.yt.setZero(n);
  out.yp.setZero(n);
  out.ytt.setZero(n);
  out.ytp.setZero(n);
  out.ypp.setZero(n);
  const double mu = std::cos(theta), s = std::sin(theta);
  if (s <= 0.0) fail(ErrorKind::InvalidInput, "harmonic derivatives requested at a pole");

  // normalized associated Legendre functions pb(l, m), no Condon-Shortley phase
  Eigen::MatrixXd pb = Eigen::MatrixXd::Zero(L + 1, L + 1);
  pb(0, 0) = std::sqrt(1.0 / (4.0 * std::numbers::pi));
  for (int m = 1; m <= L; ++m) pb(m, m) = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pb(m - 1, m - 1);
  for (int m = 0; m < L; ++m) pb(m + 1, m) = std::sqrt(2.0 * m + 3.0) * mu * pb(m, m);
  for (int m = 0; m <= L; ++m)
    for (int l = m + 2; l <= L; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
      pb(l, m) = a * (mu * pb(l - 1, m) - b * pb(l - 2, m));
    }

  const double cot = mu / s;
  for (int l = 0; l <= L; ++l)
    for (int m = 0; m <= l; ++m) {
      double p = pb(l, m);
      double prev = (l > m) ? pb(l - 1, m) : 0.0;
      double dp = (l * mu * p - std::sqrt((2.0 * l + 1.0) * (double(l) * l - double(m) * m) / (2.0 * l - 1.0)) * prev) / s;
      double ddp = -cot * dp - (l * (l + 1.0) - m * m / (s * s)) * p;
      if (m == 0) {
        int k = sh_index(l, 0);
        out.y[k] = p;
        out.yt[k] = dp;
        out.ytt[k] = ddp;
        continue;
      }
      const double r2 = std::numbers::sqrt2;
      double cm = std::cos(m * phi), sm = std::sin(m * phi);
      int kc = sh_index(l, m), ks = sh_index(l, -m);
      out.y[kc] = r2 * p * cm;
      out.yt[kc] = r2 * dp * cm;
      out.ytt[kc] = r2 * ddp * cm;
      out.yp[kc] = -m * r2 * p * sm;
      out.ytp[kc] = -m * r2 * dp * sm;
      out.ypp[kc] = -m * m * out.y[kc];
      out.y[ks] = r2 * p * sm;
      out.yt[ks] = r2 * dp * sm;
      out.ytt[ks] = r2 * ddp * sm;
      out.yp[ks] = m * r2 * p * cm;
      out.ytp[ks] = m * r2 * dp * cm;
      out.ypp[ks] = -m * m * out.y[ks];
    }
}

HarmonicTable make_table(const SphereGrid& grid, int L, bool full_basis) {
  HarmonicTable t;
  t.L = L;
  t.domain = grid.domain;
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m)
      if (full_basis || sh_admissible(grid.domain, l, m)) t.basis.push_back(sh_index(l, m));
  const int nb = t.size(), nn = grid.size();
  auto alloc = [&](Eigen::MatrixXd& a, int rows) { a.resize(rows, nb); };
  for (auto* a : {&t.y, &t.yt, &t.yp, &t.ytt, &t.ytp, &t.ypp}) alloc(*a, nn);
  ShPoint p;
  auto store = [&](int row, Eigen::MatrixXd& y, Eigen::MatrixXd& yt, Eigen::MatrixXd& yp, Eigen::MatrixXd& ytt,
                   Eigen::MatrixXd& ytp, Eigen::MatrixXd& ypp) {
    for (int b = 0; b < nb; ++b) {
      int k = t.basis[b];
      y(row, b) = p.y[k];
      yt(row, b) = p.yt[k];
      yp(row, b) = p.yp[k];
      ytt(row, b) = p.ytt[k];
      ytp(row, b) = p.ytp[k];
      ypp(row, b) = p.ypp[k];
    }
  };
  for (int i = 0; i < nn; ++i) {
    sh_eval(L, grid.theta[grid.ring(i)], grid.phi[grid.column(i)], p);
    store(i, t.y, t.yt, t.yp, t.ytt, t.ytp, t.ypp);
  }
  if (grid.domain == Domain::Hemisphere) {
    for (auto* a : {&t.ey, &t.eyt, &t.eyp, &t.eytt, &t.eytp, &t.eypp}) alloc(*a, grid.nphi);
    for (int j = 0; j < grid.nphi; ++j) {
      sh_eval(L, 0.5 * std::numbers::pi, grid.phi[j], p);
      store(j, t.ey, t.eyt, t.eyp, t.eytt, t.eytp, t.eypp);
    }
  }
  return t;
}

Eigen::VectorXd sh_project(const SphereGrid& grid, const HarmonicTable& table, const Eigen::VectorXd& values) {
  const double scale = grid.domain == Domain::Hemisphere ? 2.0 : 1.0;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sh_count(table.L));
  std::vector<double> terms(grid.size());
  for (int b = 0; b < table.size(); ++b) {
    for (int i = 0; i < grid.size(); ++i) terms[i] = grid.weight[i] * values[i] * table.y(i, b);
    out[table.basis[b]] = scale * pairwise_sum(terms);
  }
  return out;
}

Eigen::VectorXd poisson_solve(const Eigen::VectorXd& f, Domain domain, double tol) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(f.size());
  for (int k = 0; k < f.size(); ++k) {
    int l = sh_degree(k), m = sh_order(k);
    if (!sh_admissible(domain, l, m)) continue;
    if (l == 1) {
      if (std::abs(f[k]) > tol) {
        std::ostringstream os;
        os << "degree-one component " << f[k] << " in kernel of Delta + 2";
        fail(ErrorKind::InvalidInput, os.str());
      }
      continue;
    }
    u[k] = f[k] / (2.0 - l * (l + 1.0));
  }
  return u;
}

}  // namespace asymflat
