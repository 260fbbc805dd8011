#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "asymflat/extrapolate.hpp"
#include "asymflat/metric.hpp"

namespace asymflat {

struct IdentityReport {
  std::string tag;
  std::vector<double> radii;
  std::vector<double> residuals;  // nonnegative; samples at roundoff are stored as 0
  ExponentFit fit;
  double claimed = 0.0;    // claimed decay exponent
  double alternate = NAN;  // second candidate order for mixed remainders
  double bound = 0.0;      // pass when the fitted exponent is below this
  bool pass = false;
  // vector-valued identities: per-radius left side, its extrapolated limit and the predicted limit
  std::vector<Vector3d> values;
  Vector3d limit = Vector3d::Zero();
  Vector3d target = Vector3d::Zero();
};

// mass entering the leading terms: m, or m/2 for half-spaces
double nominal_mass(const MetricSpec& spec);

struct HExpansionTerms {
  bool quadratic = true;  // 9m^2/rho^3
  bool offset = true;     // 6m (x - a).a / rho^4
  bool g_term = true;     // G_{rho,a}
};

// sup over the sphere (hemisphere) about a of |H - expansion|; claimed order -4
IdentityReport h_expansion_residual(const MetricSpec& spec, const std::vector<double>& rhos,
                                    const Vector3d& a = Vector3d::Zero(), const HExpansionTerms& terms = {},
                                    int lquad = 32);

// the G_{rho,a} term at x (p = g - (1 + 2m/|x|) delta, frak r = (x - a)/rho)
double g_term(const MetricSpec& spec, const Vector3d& x, const Vector3d& a, double rho);

// [0]: |2 rho K - H (bracket)| with claimed order -3 - eps (alternate -5)
// [1]: |L_X g - 2 xi g| with X = x - a, claimed order -2 - eps
std::vector<IdentityReport> kh_relation_residual(const MetricSpec& spec, const std::vector<double>& rhos,
                                                 const Vector3d& a = Vector3d::Zero(), int lquad = 32);

struct MomentOptions {
  Vector3d a = Vector3d::Zero();
  std::optional<double> mass;      // default: flux mass limit
  std::optional<Vector3d> center;  // default: flux center limit
  std::vector<double> flux_radii;  // default 100..6400, two-term fits
  int lquad = 32;
};

// |integral of (x - a) G dS_flat + 8 pi m C| over the sphere (tangential part on hemispheres); claimed order -1
IdentityReport moment_identity(const MetricSpec& spec, const std::vector<double>& rhos, const MomentOptions& opt = {});

struct IntegrationIdentity {
  Vector2d lhs = Vector2d::Zero();
  Vector2d rhs = Vector2d::Zero();
  // right-hand integrals: (x-b) e_ij,j r_i / 2, -2 (x-b) e_ij r_i r_j / rho, (e_ii r_a + e_ia r_i) / 2, equator
  std::array<Vector2d, 4> terms{};
  double gap = 0.0;
  double relative = 0.0;  // gap over the integrand magnitude
  double magnitude = 0.0;
};

// integration by parts on the flat coordinate hemisphere about b, e = g - delta
IntegrationIdentity cmc_integration_identity(const MetricSpec& spec, double rho, const Vector2d& b = Vector2d::Zero(),
                                             int lquad = 40);

// the same identity across a ladder; residuals are relative gaps, pass when all are <= tol
IdentityReport integration_identity_report(const MetricSpec& spec, const std::vector<double>& radii,
                                           const Vector2d& b = Vector2d::Zero(), double tol = 1e-9, int lquad = 40);

// volume/area/total mean curvature relations on centered coordinate spheres; three reports for
// full spaces, the boundary relation for half-spaces; claimed growth o(r^2).
// Volumes are measured from the ball of radius r0 (default r_min + |c|).
std::vector<IdentityReport> appendixA_relations(const MetricSpec& spec, const std::vector<double>& radii,
                                                std::optional<double> r0 = std::nullopt, int lquad = 24);

}  // namespace asymflat
