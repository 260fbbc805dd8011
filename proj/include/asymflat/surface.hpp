#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "asymflat/grid.hpp"
#include "asymflat/harmonics.hpp"
#include "asymflat/metric.hpp"

namespace asymflat {

// radial graph x = a + (rho + rho^-theta_exp phi(xhat)) xhat
struct GraphSurface {
  Vector3d center = Vector3d::Zero();
  double rho = 1.0;
  double theta_exp = 0.5;
  int lmax = 0;
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(1);  // sh layout, size sh_count(lmax)
  Domain domain = Domain::Sphere;

  double scale() const;
  void resize(int L);
  double coeff(int l, int m) const;
};

GraphSurface round_surface(const Vector3d& center, double rho, Domain domain = Domain::Sphere, int lmax = 0);

// checks sizes, parity on the hemisphere and embeddedness of the graph
void validate(const GraphSurface& s, bool require_parity = true);

enum class CurvatureLevel { First, Ricci, Full };

struct NodeGeometry {
  Vector3d x;
  Vector3d xt, xp;      // parameter tangents
  Vector3d nu;          // unit normal (g), outward
  Matrix2d h, hinv;     // induced metric in (theta, phi)
  Matrix2d II;          // second fundamental form, sign so that H > 0 on round spheres
  Matrix2d W;           // shape operator, mixed
  Matrix2d Pi;          // H I - W, mixed
  std::array<Matrix2d, 2> hgamma;  // Christoffel symbols of h: hgamma[C](A,B)
  double dA = 0.0;      // area density against d Omega
  double dA_flat = 0.0; // Euclidean area density against d Omega
  double H = 0.0, K = 0.0, W2 = 0.0;
  double KG = 0.0;      // Gauss curvature (Ricci level and up)
  double ric_nn = 0.0, scalar = 0.0;
  double nabla_ric_nnn = 0.0, tr_pi_riem = 0.0;  // Full level
  double radius = 0.0;  // radial graph value R
};

struct BoundaryNode {
  NodeGeometry g;
  Vector3d mu;            // outward conormal of the surface along the boundary
  double ds = 0.0;        // arclength per unit phi
  double kappa_g = 0.0;   // geodesic curvature, positive when curving into the surface
  double angle_defect = 0.0;
  double kappa = 0.0;     // <nu, W_Sigma nu> of the boundary plane
  double dsds_phi = 0.0;  // d(ds)/d(phi)
};

struct ExtrinsicData {
  CurvatureLevel level = CurvatureLevel::First;
  std::vector<NodeGeometry> nodes;
  std::vector<BoundaryNode> boundary;
};

ExtrinsicData extrinsic(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid,
                        CurvatureLevel level = CurvatureLevel::Ricci);

struct Measures {
  double area = 0.0;
  double mean = 0.0;  // integral of H
  double volume = 0.0;
  double boundary_length = 0.0;
};

double default_r0(const MetricSpec& spec);

Measures measures(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid,
                  std::optional<double> r0 = std::nullopt);
Measures measures(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid, const ExtrinsicData& data,
                  std::optional<double> r0 = std::nullopt);

// enclosed volume by radial quadrature from an inner r0 ball about the surface center
double enclosed_volume(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid, double r0);

double free_boundary_defect(const ExtrinsicData& data);

// integral of KG plus boundary geodesic curvature
double gauss_bonnet(const SphereGrid& grid, const ExtrinsicData& data);

// Euclidean area-weighted centroid
Vector3d euclidean_centroid(const SphereGrid& grid, const ExtrinsicData& data);

double surface_integral(const SphereGrid& grid, const ExtrinsicData& data, std::span<const double> f);
double boundary_integral(const SphereGrid& grid, const ExtrinsicData& data, std::span<const double> f);

// pointwise geometry of a radial graph given R and its derivatives at (theta, phi)
struct RadialJet {
  double R, Rt, Rp, Rtt, Rtp, Rpp;
};
NodeGeometry node_geometry(const MetricSpec& spec, const Vector3d& center, double theta, double phi,
                           const RadialJet& r, CurvatureLevel level);

}  // namespace asymflat
