#include "asymflat/grid.hpp"

#include <cmath>
#include <numbers>

#include "asymflat/error.hpp"

namespace asymflat {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    w[n - 1 - i] = w[i];
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

SphereGrid make_grid(Domain domain, int lquad) {
  if (lquad < 1) fail(ErrorKind::InvalidInput, "quadrature degree must be positive");
  SphereGrid g;
  g.domain = domain;
  g.lquad = lquad;
  g.ntheta = (lquad + 2) / 2;
  g.nphi = lquad + 1;
  std::vector<double> x, w;
  gauss_legendre(g.ntheta, x, w);
  for (int i = 0; i < g.ntheta; ++i) {
    double mu = x[i], wt = w[i];
    if (domain == Domain::Hemisphere) {
      mu = 0.5 * (x[i] + 1.0);
      wt = 0.5 * w[i];
    }
    g.mu.push_back(mu);
    g.theta.push_back(std::acos(mu));
    g.wtheta.push_back(wt);
  }
  const double dphi = 2.0 * std::numbers::pi / g.nphi;
  for (int j = 0; j < g.nphi; ++j) g.phi.push_back(j * dphi);
  for (int i = 0; i < g.ntheta; ++i) {
    double s = std::sqrt(std::max(0.0, 1.0 - g.mu[i] * g.mu[i]));
    for (int j = 0; j < g.nphi; ++j) {
      g.weight.push_back(g.wtheta[i] * dphi);
      g.dir.emplace_back(s * std::cos(g.phi[j]), s * std::sin(g.phi[j]), g.mu[i]);
    }
  }
  return g;
}

double SphereGrid::total_weight() const { return pairwise_sum(weight); }

double SphereGrid::equator_weight() const { return 2.0 * std::numbers::pi / nphi; }

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double a : v) s += a;
    return s;
  }
  std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(std::span<const double>(v)); }

double integrate(const SphereGrid& grid, std::span<const double> values) {
  std::vector<double> t(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) t[i] = grid.weight[i] * values[i];
  return pairwise_sum(t);
}

Eigen::Vector3d integrate3(const SphereGrid& grid, std::span<const Eigen::Vector3d> values) {
  Eigen::Vector3d r;
  std::vector<double> t(values.size());
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < values.size(); ++i) t[i] = grid.weight[i] * values[i][k];
    r[k] = pairwise_sum(t);
  }
  return r;
}

}  // namespace asymflat
