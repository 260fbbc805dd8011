#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace asymflat {

enum class Domain { Sphere, Hemisphere };

// Gauss-Legendre in cos(theta) times a uniform phi grid. Exact for
// polynomial integrands of total degree <= lquad.
struct SphereGrid {
  Domain domain = Domain::Sphere;
  int lquad = 0;
  int ntheta = 0;
  int nphi = 0;
  std::vector<double> mu;      // per theta ring
  std::vector<double> theta;   // per theta ring
  std::vector<double> wtheta;  // per theta ring
  std::vector<double> phi;     // per phi column
  std::vector<double> weight;  // per node, for d(Omega)
  std::vector<Eigen::Vector3d> dir;

  int size() const { return ntheta * nphi; }
  int ring(int node) const { return node / nphi; }
  int column(int node) const { return node % nphi; }
  double total_weight() const;
  // equator ring for hemispheres: angles phi[j], weight 2 pi / nphi each
  double equator_weight() const;
};

SphereGrid make_grid(Domain domain, int lquad);

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

double pairwise_sum(std::span<const double> v);
double pairwise_sum(const std::vector<double>& v);

// integral over the grid domain of values given per node (d Omega measure)
double integrate(const SphereGrid& grid, std::span<const double> values);
Eigen::Vector3d integrate3(const SphereGrid& grid, std::span<const Eigen::Vector3d> values);

}  // namespace asymflat
