#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asymflat/foliation.hpp"
#include "asymflat/surface.hpp"

namespace asymflat {

// Laplacian is -Delta_S with the same boundary handling as the Jacobi operators
enum class OperatorKind { CMCJacobi, TildeKJacobi, Laplacian };
enum class BoundaryCondition { None, Robin };

std::string to_string(OperatorKind k);
OperatorKind operator_from_string(const std::string& s);

// Galerkin matrices in the admissible harmonic basis of degree <= L, pulled back to the surface
struct OperatorMatrix {
  OperatorKind kind = OperatorKind::CMCJacobi;
  BoundaryCondition bc = BoundaryCondition::None;
  Domain domain = Domain::Sphere;
  int L = 0;
  std::vector<int> basis;
  Eigen::MatrixXd A;         // quadratic form
  Eigen::MatrixXd B;         // Gram matrix in the induced metric
  Eigen::VectorXd integrals; // integral of each basis function over the surface
  double symmetry_defect = 0.0;
  double min_pi = 0.0;       // smallest Newton tensor eigenvalue over the nodes (K~ operator)
};

OperatorMatrix assemble(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid, OperatorKind kind,
                        int L, BoundaryCondition bc = BoundaryCondition::None);

struct SpectrumResult {
  Eigen::VectorXd values;  // lowest k, ascending
  Eigen::MatrixXd vectors; // basis coefficients, columns
  double constrained = 0.0;             // lowest eigenvalue on {integral f dS = 0}
  Eigen::VectorXd constrained_vector;
};

SpectrumResult spectrum(const OperatorMatrix& op, int k);

// spectra across the leaves of a sweep: TildeKJacobi on closed leaves, Robin CMCJacobi on hemispheres
struct LeafSpectrum {
  double rho = 0.0;
  Eigen::VectorXd values;
  double constrained = 0.0;
  double min_pi = 0.0;
  double symmetry_defect = 0.0;
};

struct SpectrumSweep {
  OperatorKind kind = OperatorKind::TildeKJacobi;
  BoundaryCondition bc = BoundaryCondition::None;
  std::vector<LeafSpectrum> leaves;
  // lowest and constrained eigenvalue as sum_k a_k rho^-(p + k)
  int lowest_power = 0, constrained_power = 0;
  std::vector<double> lowest_fit, constrained_fit;
};

SpectrumSweep leaf_spectra(const MetricSpec& spec, const std::vector<LeafResult>& leaves, int L = 8, int k = 4,
                           int lquad = 32);

// quadratic form of the operator on a function given by basis coefficients
double quadratic_form(const OperatorMatrix& op, const Eigen::VectorXd& c);

struct VariationTrack {
  bool valid = false;
  double exact = 0.0;
  std::vector<double> estimates;  // centered differences, one per step
  std::vector<double> errors;     // relative to max(|exact|, integrand magnitude)
  double richardson = 0.0;        // from the two smallest steps
  double residual = 0.0;          // relative error of the Richardson value
  double order = 0.0;             // observed order of the raw differences; inf when all errors are at roundoff
};

struct VariationReport {
  std::vector<double> steps;
  VariationTrack area;    // dA/dt against the integral of H f
  VariationTrack mean;    // d/dt integral of H against 2 integral of K~ f (closed surfaces)
  VariationTrack second;  // d2/dt2 (A - H0 V) against the Jacobi form (CMC surfaces)
};

// radial variation R -> R + t u; u given as harmonic coefficients (full layout, length units)
VariationReport variation_check(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid,
                                const Eigen::VectorXd& u, const std::vector<double>& steps);

struct ReillyResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;       // |lhs - rhs|
  double relative = 0.0;  // gap / max(|lhs|, |rhs|); equals gap when degenerate
  bool degenerate = false;
};

// two sides of the Reilly identity on a hemisphere for f given by harmonic coefficients
ReillyResult reilly_check(const MetricSpec& spec, const GraphSurface& s, const SphereGrid& grid,
                          const Eigen::VectorXd& f);

}  // namespace asymflat
